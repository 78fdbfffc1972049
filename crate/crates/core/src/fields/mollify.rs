use super::grid::GridField;
use super::norms::sup_over;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Space-time kernel `psi_eps(x) chi_eps(t)` with polynomial profiles `(1 - s^2)^3` on `s < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mollifier {
    pub eps: f64,
}

fn profile(s: f64) -> f64 {
    if s < 1.0 {
        (1.0 - s * s).powi(3)
    } else {
        0.0
    }
}

impl Mollifier {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::invalid(format!("mollifier eps must be positive, got {eps}")));
        }
        Ok(Mollifier { eps })
    }

    /// Normalized spatial stencil as (offset vector, weight).
    pub fn space_stencil(&self, dim: usize, dx: f64) -> Vec<(Vec<i64>, f64)> {
        let k = (self.eps / dx).floor() as i64;
        let mut out = Vec::new();
        let side = 2 * k + 1;
        for code in 0..side.pow(dim as u32) {
            let mut c = code;
            let mut off = vec![0i64; dim];
            for o in off.iter_mut().rev() {
                *o = c % side - k;
                c /= side;
            }
            let r = off.iter().map(|&o| (o as f64 * dx).powi(2)).sum::<f64>().sqrt() / self.eps;
            let w = profile(r);
            if w > 0.0 {
                out.push((off, w));
            }
        }
        let total: f64 = out.iter().map(|p| p.1).sum();
        out.iter_mut().for_each(|p| p.1 /= total);
        out
    }

    /// Normalized temporal stencil as (offset, weight).
    pub fn time_stencil(&self, dt: f64) -> Vec<(i64, f64)> {
        let k = (self.eps / dt).floor() as i64;
        let mut out: Vec<(i64, f64)> = (-k..=k).map(|o| (o, profile((o as f64 * dt).abs() / self.eps))).filter(|p| p.1 > 0.0).collect();
        let total: f64 = out.iter().map(|p| p.1).sum();
        out.iter_mut().for_each(|p| p.1 /= total);
        out
    }
}

/// Discrete convolution: periodic in space, reflected at the slab ends in time.
pub fn mollify(field: &GridField, m: &Mollifier) -> Result<GridField> {
    let g = field.grid;
    if m.eps < 2.0 * g.dx() {
        return Err(Error::invalid(format!("mollifier eps {} below two grid spacings {}", m.eps, 2.0 * g.dx())));
    }
    let nc = field.ncomp();
    let ns = g.n_space();
    let nx = g.nx as i64;
    let stencil = m.space_stencil(g.dim, g.dx());
    // Flat spatial shifts are not translation invariant across axes; resolve per node.
    let mut spatial = vec![0.0; field.data.len()];
    let mut ix = vec![0i64; g.dim];
    for s in 0..ns {
        let mut rest = s as i64;
        for k in (0..g.dim).rev() {
            ix[k] = rest % nx;
            rest /= nx;
        }
        let neighbors: Vec<(usize, f64)> = stencil
            .iter()
            .map(|(off, w)| (ix.iter().zip(off).fold(0i64, |acc, (&i, &o)| acc * nx + (i + o).rem_euclid(nx)) as usize, *w))
            .collect();
        for it in 0..g.nt {
            let dst = (it * ns + s) * nc;
            for &(nb, w) in &neighbors {
                let src = (it * ns + nb) * nc;
                for c in 0..nc {
                    spatial[dst + c] += w * field.data[src + c];
                }
            }
        }
    }
    let tst = m.time_stencil(g.dt());
    let last = g.nt as i64 - 1;
    let mut out = GridField { grid: g, kind: field.kind, data: vec![0.0; field.data.len()] };
    let w = ns * nc;
    for it in 0..g.nt {
        for &(o, wt) in &tst {
            let mut j = it as i64 + o;
            if j < 0 {
                j = -j;
            }
            if j > last {
                j = 2 * last - j;
            }
            let j = j.clamp(0, last) as usize;
            let (dst, src) = (it * w, j * w);
            for k in 0..w {
                out.data[dst + k] += wt * spatial[src + k];
            }
        }
    }
    Ok(out)
}

/// Sup over slices of `|| (uv)_eps - u_eps v_eps ||_{L2}` for scalar fields.
pub fn commutator_defect(u: &GridField, v: &GridField, m: &Mollifier) -> Result<f64> {
    let uv = u.zip_map(v, |a, b| a * b)?;
    let (ue, ve, uve) = (mollify(u, m)?, mollify(v, m)?, mollify(&uv, m)?);
    let defect = uve.zip_map(&ue.zip_map(&ve, |a, b| a * b)?, |a, b| a - b)?;
    sup_over(&defect, 0, defect.grid.nt, |it| super::norms::l2_norm(&defect, it))
}
