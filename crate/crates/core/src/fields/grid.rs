use crate::convex_geometry::LensBody;
use crate::error::{Error, Result};
use crate::relaxation::State;
use serde::{Deserialize, Serialize};

/// Periodic torus `[0, L)^n` with `N_x` points per axis, times `N_t` slices spanning `[t0, t1]` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub nx: usize,
    pub nt: usize,
    pub t0: f64,
    pub t1: f64,
    pub period: f64,
}

impl GridSpec {
    pub fn new(dim: usize, nx: usize, nt: usize, t0: f64, t1: f64, period: f64) -> Result<Self> {
        let g = GridSpec { dim, nx, nt, t0, t1, period };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.dim) {
            return Err(Error::invalid(format!("grid dimension {} not in {{2, 3}}", self.dim)));
        }
        if self.nx < 8 || self.nt < 8 {
            return Err(Error::invalid("grid needs at least 8 points per axis and 8 slices"));
        }
        if !(self.t1 > self.t0) || !(self.period > 0.0) || !self.t0.is_finite() || !self.t1.is_finite() {
            return Err(Error::invalid("grid needs t1 > t0 and a positive period"));
        }
        Ok(())
    }

    pub fn n_space(&self) -> usize {
        self.nx.pow(self.dim as u32)
    }
    pub fn n_nodes(&self) -> usize {
        self.nt * self.n_space()
    }
    pub fn dx(&self) -> f64 {
        self.period / self.nx as f64
    }
    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / (self.nt - 1) as f64
    }
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }
    pub fn volume(&self) -> f64 {
        self.period.powi(self.dim as i32)
    }
    pub fn time(&self, it: usize) -> f64 {
        self.t0 + it as f64 * self.dt()
    }

    /// Flat node index; the last spatial index runs fastest.
    pub fn node(&self, it: usize, ix: &[usize]) -> usize {
        it * self.n_space() + ix.iter().fold(0, |acc, &i| acc * self.nx + i)
    }

    pub fn split(&self, node: usize) -> (usize, Vec<usize>) {
        let it = node / self.n_space();
        let mut rest = node % self.n_space();
        let mut ix = vec![0; self.dim];
        for k in (0..self.dim).rev() {
            ix[k] = rest % self.nx;
            rest /= self.nx;
        }
        (it, ix)
    }

    /// `(t, x_1, .., x_n)` of a node.
    pub fn coords(&self, node: usize) -> Vec<f64> {
        let (it, ix) = self.split(node);
        std::iter::once(self.time(it)).chain(ix.iter().map(|&i| i as f64 * self.dx())).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Velocity,
    State,
    Scalar,
    /// Per node: axis (n), half-separation, radius, translation (n).
    Body,
}

impl FieldKind {
    pub fn components(&self, dim: usize) -> usize {
        match self {
            FieldKind::Velocity => dim,
            FieldKind::State => State::n_components(dim),
            FieldKind::Scalar => 1,
            FieldKind::Body => 2 * dim + 2,
        }
    }
}

/// Node-major, component-minor samples on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: GridSpec,
    pub kind: FieldKind,
    pub data: Vec<f64>,
}

pub type VelocityField = GridField;
pub type StateField = GridField;
pub type ScalarField = GridField;
pub type BodyField = GridField;

impl GridField {
    pub fn zeros(grid: GridSpec, kind: FieldKind) -> Self {
        GridField { grid, kind, data: vec![0.0; grid.n_nodes() * kind.components(grid.dim)] }
    }

    pub fn from_fn(grid: GridSpec, kind: FieldKind, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let nc = kind.components(grid.dim);
        let mut out = Self::zeros(grid, kind);
        for node in 0..grid.n_nodes() {
            let vals = f(&grid.coords(node));
            out.data[node * nc..(node + 1) * nc].copy_from_slice(&vals[..nc]);
        }
        out
    }

    /// Same lens at every node.
    pub fn uniform_body(grid: GridSpec, body: &LensBody) -> Self {
        let mut vals = body.axis().to_vec();
        vals.push(body.half_separation());
        vals.push(body.radius());
        vals.extend_from_slice(body.translation());
        let mut out = Self::zeros(grid, FieldKind::Body);
        for chunk in out.data.chunks_mut(vals.len()) {
            chunk.copy_from_slice(&vals);
        }
        out
    }

    pub fn ncomp(&self) -> usize {
        self.kind.components(self.grid.dim)
    }

    pub fn at(&self, node: usize) -> &[f64] {
        let nc = self.ncomp();
        &self.data[node * nc..(node + 1) * nc]
    }

    pub fn at_mut(&mut self, node: usize) -> &mut [f64] {
        let nc = self.ncomp();
        &mut self.data[node * nc..(node + 1) * nc]
    }

    pub fn slice(&self, it: usize) -> &[f64] {
        let w = self.grid.n_space() * self.ncomp();
        &self.data[it * w..(it + 1) * w]
    }

    pub fn state(&self, node: usize) -> State {
        State::from_components(self.grid.dim, self.at(node))
    }

    pub fn body(&self, node: usize) -> Result<LensBody> {
        let n = self.grid.dim;
        let p = self.at(node);
        let b = LensBody::new(&p[..n], p[n], p[n + 1])?;
        if p[n + 2..].iter().any(|&t| t != 0.0) {
            b.translated(&p[n + 2..])
        } else {
            Ok(b)
        }
    }

    /// Velocity part of a state field.
    pub fn velocity(&self) -> GridField {
        self.components_subset(FieldKind::Velocity, 0)
    }

    /// Extracts `kind.components` consecutive components starting at `offset`.
    pub fn components_subset(&self, kind: FieldKind, offset: usize) -> GridField {
        let nc = self.ncomp();
        let k = kind.components(self.grid.dim);
        let mut out = GridField::zeros(self.grid, kind);
        for node in 0..self.grid.n_nodes() {
            out.data[node * k..(node + 1) * k].copy_from_slice(&self.data[node * nc + offset..node * nc + offset + k]);
        }
        out
    }

    /// Component `c` as a scalar field.
    pub fn component(&self, c: usize) -> GridField {
        self.components_subset(FieldKind::Scalar, c)
    }

    pub fn check_compatible(&self, other: &GridField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::invalid("fields live on different grids"));
        }
        Ok(())
    }

    pub fn zip_map(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> Result<GridField> {
        self.check_compatible(other)?;
        if self.kind != other.kind {
            return Err(Error::invalid("field kinds differ"));
        }
        Ok(GridField { grid: self.grid, kind: self.kind, data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect() })
    }

    pub fn max_abs_diff(&self, other: &GridField) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}
