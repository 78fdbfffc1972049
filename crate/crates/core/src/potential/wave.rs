use super::cutoff::CutoffProfile;
use super::frame::WaveFrame;
use super::jet::{Jet, JetSpace};
use super::operator::{CompiledRows, PotentialOperator};
use crate::error::{Error, Result};
use crate::relaxation::State;
use crate::vecops::norm;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Replayable description of one localized wave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveDescriptor {
    pub frame: WaveFrame,
    pub cutoff: CutoffProfile,
    pub eps: f64,
    pub phase: f64,
}

/// `z_eps = A(grad)[eps^3 phi cos((c t + xi.x)/eps + phase)]`, evaluated exactly through jets.
#[derive(Debug, Clone)]
pub struct LocalizedWave {
    desc: WaveDescriptor,
    space3: JetSpace,
    rows3: CompiledRows,
    space4: JetSpace,
    rows4: CompiledRows,
}

impl LocalizedWave {
    pub fn new(desc: WaveDescriptor) -> Result<Self> {
        let n = desc.frame.dim();
        if desc.cutoff.nvars() != n + 1 {
            return Err(Error::DimensionMismatch { expected: n + 1, got: desc.cutoff.nvars() });
        }
        if !(desc.eps > 0.0 && desc.eps.is_finite()) {
            return Err(Error::invalid(format!("eps must be positive, got {}", desc.eps)));
        }
        let op = PotentialOperator::from_frame(&desc.frame);
        let space3 = JetSpace::new(n + 1, 3);
        let space4 = JetSpace::new(n + 1, 4);
        let rows3 = CompiledRows::compile(&op.rows, &space3)?;
        let rows4 = CompiledRows::compile(&op.residual_rows(), &space4)?;
        Ok(LocalizedWave { desc, space3, rows3, space4, rows4 })
    }

    pub fn descriptor(&self) -> &WaveDescriptor {
        &self.desc
    }

    pub fn n(&self) -> usize {
        self.desc.frame.dim()
    }

    /// Phase argument `(c t + xi.x)/eps + phase` at `p = (t, x)`.
    pub fn argument(&self, p: &[f64]) -> f64 {
        let f = &self.desc.frame;
        let s = f.c * p[0] + f.xi.iter().zip(&p[1..]).map(|(a, b)| a * b).sum::<f64>();
        s / self.desc.eps + self.desc.phase
    }

    fn profile_jet(&self, space: &JetSpace, p: &[f64]) -> Jet {
        let order = space.order();
        let f = &self.desc.frame;
        let eps = self.desc.eps;
        let taylor: Vec<Vec<f64>> = (0..space.nvars()).map(|k| self.desc.cutoff.factor_taylor(k, p[k], order)).collect();
        let phi = space.tensor_product(&taylor);
        let arg = self.argument(p);
        let freq: Vec<f64> = std::iter::once(f.c).chain(f.xi.iter().copied()).map(|w| w / eps).collect();
        let cos_jet = space.from_derivatives(|m| {
            let deg: usize = m.iter().map(|&k| k as usize).sum();
            let mono: f64 = (0..space.nvars()).map(|k| freq[k].powi(m[k] as i32)).product();
            eps.powi(3) * mono * (arg + deg as f64 * FRAC_PI_2).cos()
        });
        space.mul(&phi, &cos_jet)
    }

    /// Component vector in `State` layout; exact zero outside the open cutoff box.
    pub fn eval_into(&self, p: &[f64], out: &mut [f64]) {
        if self.desc.frame.is_zero() || !self.desc.cutoff.contains(p) {
            out.iter_mut().for_each(|o| *o = 0.0);
            return;
        }
        let jet = self.profile_jet(&self.space3, p);
        self.rows3.apply_into(&jet, out);
    }

    pub fn eval(&self, p: &[f64]) -> State {
        let mut out = vec![0.0; State::n_components(self.n())];
        self.eval_into(p, &mut out);
        State::from_components(self.n(), &out)
    }

    /// `phi(p) lambda sin(argument)`.
    pub fn leading_term(&self, p: &[f64]) -> Result<State> {
        let lam = self.desc.frame.lambda()?;
        Ok(lam.state.scale(self.desc.cutoff.value(p) * self.argument(p).sin()))
    }

    /// Momentum (n entries) and divergence residual of the wave at `p`, from order-4 jets.
    pub fn residual(&self, p: &[f64]) -> (Vec<f64>, f64) {
        let n = self.n();
        if self.desc.frame.is_zero() || !self.desc.cutoff.contains(p) {
            return (vec![0.0; n], 0.0);
        }
        let jet = self.profile_jet(&self.space4, p);
        let out = self.rows4.apply(&jet);
        (out[..n].to_vec(), out[n])
    }

    /// Oscillation periods across the narrowest spatial plateau side along `xi`.
    pub fn plateau_periods(&self) -> f64 {
        let (lo, hi) = self.desc.cutoff.plateau();
        let width = (1..lo.len()).map(|k| hi[k] - lo[k]).fold(f64::INFINITY, f64::min);
        norm(&self.desc.frame.xi) * width / (2.0 * PI * self.desc.eps)
    }

    /// Set when the plateau holds less than one period.
    pub fn too_few_periods(&self) -> bool {
        !self.desc.frame.is_zero() && self.plateau_periods() < 1.0
    }
}
