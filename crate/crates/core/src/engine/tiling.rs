use crate::error::{Error, Result};
use crate::fields::GridSpec;
use serde::{Deserialize, Serialize};

/// One space-time cube `eps i + [0, eps)^{n+1} + (d(i) eps / 2) e_0`, restricted to the slab.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    /// `(i_0, i_1, .., i_n)`; `i_0` counts time layers.
    pub index: Vec<i64>,
    pub parity: u8,
    /// Lower corner `(t, x_1, .., x_n)`.
    pub lo: Vec<f64>,
    pub nodes: Vec<usize>,
}

impl Cube {
    pub fn hi(&self, eps: f64) -> Vec<f64> {
        self.lo.iter().map(|x| x + eps).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tiling {
    pub eps: f64,
    pub cubes_per_axis: usize,
    /// Plateau side over cube side, `(9/10)^(1/n)`.
    pub subcube_ratio: f64,
    /// Sorted lexicographically by index.
    pub cubes: Vec<Cube>,
}

/// Parity of `sum_{j >= 1} i_j`.
pub fn parity(index: &[i64]) -> u8 {
    (index[1..].iter().sum::<i64>().rem_euclid(2)) as u8
}

/// Offset-cube partition of the grid; `eps` must be a whole number (at least 4) of spacings dividing the period.
pub fn build_tiling(grid: &GridSpec, eps: f64) -> Result<Tiling> {
    let dx = grid.dx();
    let pts = eps / dx;
    if pts < 4.0 - 1e-9 {
        return Err(Error::invalid(format!("cube edge {eps} is below four grid spacings")));
    }
    if (pts - pts.round()).abs() > 1e-9 || grid.nx % (pts.round() as usize) != 0 {
        return Err(Error::invalid(format!("cube edge {eps} must be a whole number of spacings dividing the period")));
    }
    let pts = pts.round() as usize;
    let m = grid.nx / pts;
    let n = grid.dim;
    let ns = grid.n_space();
    let mut map: std::collections::BTreeMap<Vec<i64>, Vec<usize>> = Default::default();
    for node in 0..grid.n_nodes() {
        let (it, ix) = grid.split(node);
        let mut index = vec![0i64; n + 1];
        for k in 0..n {
            index[k + 1] = (ix[k] / pts) as i64;
        }
        let d = parity(&index) as f64;
        let tau = grid.time(it) - grid.t0;
        // Nudge by a relative 1e-9 so node times on a cube face fall into the upper cube.
        index[0] = ((tau - 0.5 * d * eps) / eps + 1e-9).floor() as i64;
        map.entry(index).or_default().push(node);
        let _ = ns;
    }
    let cubes = map
        .into_iter()
        .map(|(index, nodes)| {
            let d = parity(&index);
            let mut lo = vec![grid.t0 + eps * index[0] as f64 + 0.5 * d as f64 * eps];
            lo.extend(index[1..].iter().map(|&i| eps * i as f64));
            Cube { index, parity: d, lo, nodes }
        })
        .collect();
    Ok(Tiling { eps, cubes_per_axis: m, subcube_ratio: 0.9f64.powf(1.0 / n as f64), cubes })
}

impl Tiling {
    /// Time plateau `[lo, hi]` of a cube's subcube.
    pub fn time_plateau(&self, cube: &Cube) -> (f64, f64) {
        let ramp = 0.5 * self.eps * (1.0 - self.subcube_ratio);
        (cube.lo[0] + ramp, cube.lo[0] + self.eps - ramp)
    }
}
