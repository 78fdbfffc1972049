use super::WaveRecord;
use crate::convex_geometry::LensBody;
use crate::error::{Error, Result, Witness};
use crate::fields::{linear_system_residual, FieldKind, GridField, GridSpec, ResidualReport};
use crate::relaxation::{f_map, lens_hull_margin, State};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// A point of `X_0`: state field, base field, body field and energy field, with cached margins.
#[derive(Debug, Clone)]
pub struct SubsolutionState {
    pub z: GridField,
    pub base: GridField,
    pub bodies: GridField,
    pub ebar: GridField,
    /// Raw hull margin per node; `+inf` on coincidence nodes (`ebar = 0`).
    pub margins: GridField,
    pub waves: Vec<WaveRecord>,
}

/// Raw hull margin of node state `zc` against base `z0`, untranslated lens parameters `body` and energy `e`.
#[inline]
pub fn node_margin(n: usize, zc: &[f64], z0: &[f64], body: &[f64], e: f64) -> f64 {
    lens_hull_margin(&zc[..n], &zc[n..zc.len() - 1], &z0[..n], &body[..n], body[n], body[n + 1], e.sqrt())
}

impl SubsolutionState {
    pub fn new(z: GridField, base: GridField, bodies: GridField, ebar: GridField) -> Result<Self> {
        for (f, kind) in [(&z, FieldKind::State), (&base, FieldKind::State), (&bodies, FieldKind::Body), (&ebar, FieldKind::Scalar)] {
            z.check_compatible(f)?;
            if f.kind != kind {
                return Err(Error::invalid(format!("expected a {kind:?} field")));
            }
        }
        let n = z.grid.dim;
        for node in 0..z.grid.n_nodes() {
            let p = bodies.at(node);
            if p[n + 2..].iter().any(|&t| t != 0.0) {
                return Err(Error::invalid("engine bodies must be untranslated"));
            }
            bodies.body(node)?;
            if !(ebar.at(node)[0] >= 0.0) {
                return Err(Error::invalid("energy field must be nonnegative"));
            }
        }
        let mut s = SubsolutionState { margins: GridField::zeros(z.grid, FieldKind::Scalar), z, base, bodies, ebar, waves: Vec::new() };
        s.refresh_margins();
        Ok(s)
    }

    /// Constant base `z0 = (v0, M0, q0)`, lens `body` and energy `e` at every node, with `z = z0`.
    pub fn constant(grid: GridSpec, z0: &State, body: &LensBody, e: f64) -> Result<Self> {
        let base = GridField::from_fn(grid, FieldKind::State, |_| z0.components());
        let ebar = GridField::from_fn(grid, FieldKind::Scalar, |_| vec![e]);
        Self::new(base.clone(), base, GridField::uniform_body(grid, body), ebar)
    }

    pub fn grid(&self) -> GridSpec {
        self.z.grid
    }

    pub fn refresh_margins(&mut self) {
        let n = self.grid().dim;
        for node in 0..self.grid().n_nodes() {
            let e = self.ebar.at(node)[0];
            self.margins.data[node] = if e == 0.0 {
                f64::INFINITY
            } else {
                node_margin(n, self.z.at(node), self.base.at(node), self.bodies.at(node), e)
            };
        }
    }

    pub fn min_margin(&self) -> f64 {
        self.margins.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        crate::fields::write_field(&dir.join("z.fld"), &self.z)?;
        crate::fields::write_field(&dir.join("base.fld"), &self.base)?;
        crate::fields::write_field(&dir.join("bodies.fld"), &self.bodies)?;
        crate::fields::write_field(&dir.join("ebar.fld"), &self.ebar)?;
        std::fs::write(dir.join("waves.json"), serde_json::to_string(&self.waves)?)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let rd = |name: &str| crate::fields::read_field(&dir.join(name));
        let mut s = Self::new(rd("z.fld")?, rd("base.fld")?, rd("bodies.fld")?, rd("ebar.fld")?)?;
        if let Ok(w) = std::fs::read_to_string(dir.join("waves.json")) {
            s.waves = serde_json::from_str(&w)?;
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct X0Tolerances {
    /// Inside requires raw margin above this.
    pub slack: f64,
    /// Coincidence nodes must match the base to this.
    pub coincidence: f64,
    /// Bound on the analytic residual of every inserted wave.
    pub wave_residual: f64,
    /// Optional bound on the grid residual of the base field.
    pub base_residual: Option<f64>,
}

impl Default for X0Tolerances {
    fn default() -> Self {
        X0Tolerances { slack: 1e-7, coincidence: 1e-12, wave_residual: 1e-6, base_residual: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct X0Report {
    pub pass: bool,
    pub nodes: usize,
    pub outside: usize,
    pub coincidence_nodes: usize,
    pub min_margin: f64,
    pub witness: Option<Witness>,
    pub wave_residual_max: f64,
    pub base_residual: ResidualReport,
}

/// Per-node interior-hull or base-coincidence check plus residual bookkeeping.
pub fn check_x0(s: &SubsolutionState, tol: &X0Tolerances) -> Result<X0Report> {
    let g = s.grid();
    let n = g.dim;
    let mut outside = 0;
    let mut coincide = 0;
    let mut min_margin = f64::INFINITY;
    let mut witness = None;
    for node in 0..g.n_nodes() {
        let e = s.ebar.at(node)[0];
        let (ok, detail) = if e == 0.0 {
            coincide += 1;
            let (zc, z0) = (s.z.at(node), s.base.at(node));
            let d = zc[..zc.len() - 1].iter().zip(&z0[..zc.len() - 1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let defect = State::from_components(n, z0).constraint_defect();
            let _ = f_map;
            (d <= tol.coincidence && defect <= tol.coincidence, format!("coincidence gap {d:e}"))
        } else {
            let m = node_margin(n, s.z.at(node), s.base.at(node), s.bodies.at(node), e);
            min_margin = min_margin.min(m);
            (m > tol.slack, format!("hull margin {m:e}"))
        };
        if !ok {
            outside += 1;
            if witness.is_none() {
                let (time_index, space_index) = g.split(node);
                witness = Some(Witness { node, time_index, space_index, detail });
            }
        }
    }
    let wave_residual_max = s.waves.iter().map(|w| w.residual_max).fold(0.0, f64::max);
    let base_residual = linear_system_residual(&s.base)?;
    let base_ok = tol.base_residual.map_or(true, |b| base_residual.momentum.max(base_residual.divergence) <= b);
    Ok(X0Report {
        pass: outside == 0 && wave_residual_max <= tol.wave_residual && base_ok,
        nodes: g.n_nodes(),
        outside,
        coincidence_nodes: coincide,
        min_margin,
        witness,
        wave_residual_max,
        base_residual,
    })
}
