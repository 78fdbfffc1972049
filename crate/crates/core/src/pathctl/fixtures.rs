use crate::error::{Error, Result};
use crate::fields::{linear_system_residual, FieldKind, GridField, GridSpec, ResidualReport};
use crate::relaxation::euler_to_relaxed;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Closed-form stationary Euler solution sampled on a grid.
#[derive(Debug, Clone)]
pub struct SolutionFixture {
    pub tag: String,
    pub u: GridField,
    pub p: GridField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FixtureSpec {
    Zero,
    Constant { value: Vec<f64> },
    /// `u = (A sin(2 pi k x_2 / L), 0, ..)`, `p = 0`.
    Shear { amplitude: f64, wavenumber: u32 },
}

/// Euler residuals above this reject a fixture.
pub const FIXTURE_RESIDUAL_TOL: f64 = 1e-8;

impl SolutionFixture {
    pub fn build(grid: GridSpec, spec: &FixtureSpec) -> Result<Self> {
        let n = grid.dim;
        let (tag, u) = match spec {
            FixtureSpec::Zero => ("zero".to_string(), GridField::zeros(grid, FieldKind::Velocity)),
            FixtureSpec::Constant { value } => {
                if value.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: value.len() });
                }
                ("constant".to_string(), GridField::from_fn(grid, FieldKind::Velocity, |_| value.clone()))
            }
            FixtureSpec::Shear { amplitude, wavenumber } => {
                let (a, k) = (*amplitude, *wavenumber as f64);
                let u = GridField::from_fn(grid, FieldKind::Velocity, |p| {
                    let mut v = vec![0.0; n];
                    v[0] = a * (2.0 * PI * k * p[2] / grid.period).sin();
                    v
                });
                ("shear".to_string(), u)
            }
        };
        let f = SolutionFixture { tag, p: GridField::zeros(grid, FieldKind::Scalar), u };
        let r = f.euler_residual()?;
        if r.momentum.max(r.divergence) > FIXTURE_RESIDUAL_TOL {
            return Err(Error::invalid(format!("fixture {} is not an Euler solution: {r:?}", f.tag)));
        }
        Ok(f)
    }

    /// `(u, F(u), p + |u|^2/n)` at every node.
    pub fn relaxed(&self) -> GridField {
        let g = self.u.grid;
        let mut z = GridField::zeros(g, FieldKind::State);
        for node in 0..g.n_nodes() {
            z.at_mut(node).copy_from_slice(&euler_to_relaxed(self.u.at(node), self.p.at(node)[0]).components());
        }
        z
    }

    /// Momentum and divergence residual of the Euler system, via the relaxed linear system on the constraint set.
    pub fn euler_residual(&self) -> Result<ResidualReport> {
        linear_system_residual(&self.relaxed())
    }
}
