use super::grid::{FieldKind, GridField};
use super::spectral::SpectralPlan;
use crate::convex_geometry::{lens_gauge, ConvexBodyView};
use crate::error::{Error, Result};
use crate::relaxation::{f_map_into, sym_index, sym_len};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Component `c` of slice `it` as a flat spatial array.
pub fn slice_component(f: &GridField, it: usize, c: usize) -> Vec<f64> {
    let nc = f.ncomp();
    f.slice(it).iter().skip(c).step_by(nc).copied().collect()
}

fn check_slice(f: &GridField, it: usize) -> Result<()> {
    if it >= f.grid.nt {
        return Err(Error::invalid(format!("slice {it} out of range (nt = {})", f.grid.nt)));
    }
    Ok(())
}

/// L2 norm of one slice (rectangle rule, exact for trigonometric polynomials).
pub fn l2_norm(f: &GridField, it: usize) -> Result<f64> {
    check_slice(f, it)?;
    Ok((f.grid.cell_volume() * f.slice(it).iter().map(|x| x * x).sum::<f64>()).sqrt())
}

/// Maximum of a per-slice quantity over slices `lo..hi`, evaluated in parallel and reduced in slice order.
pub fn sup_over<F>(f: &GridField, lo: usize, hi: usize, per_slice: F) -> Result<f64>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    let vals: Vec<f64> = (lo..hi).into_par_iter().map(&per_slice).collect::<Result<_>>()?;
    let _ = f;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

pub fn sup_l2(f: &GridField) -> Result<f64> {
    sup_over(f, 0, f.grid.nt, |it| l2_norm(f, it))
}

/// Discrete `H^{-1}` norm with weights `(1 + |2 pi k / L|^2)^{-1/2}` on the Fourier amplitudes.
pub fn h_minus1_norm(f: &GridField, it: usize) -> Result<f64> {
    check_slice(f, it)?;
    let plan = SpectralPlan::new(&f.grid);
    h_minus1_with(&plan, f, it)
}

pub fn h_minus1_with(plan: &SpectralPlan, f: &GridField, it: usize) -> Result<f64> {
    let comps: Vec<Vec<f64>> = (0..f.ncomp()).map(|c| slice_component(f, it, c)).collect();
    Ok(h_minus1_raw(plan, &comps, f.grid.volume()))
}

/// `H^{-1}` norm of spatial component arrays on a torus of the given volume.
pub fn h_minus1_raw(plan: &SpectralPlan, comps: &[Vec<f64>], volume: f64) -> f64 {
    let mut acc = 0.0;
    let mut n_total = 1.0;
    for values in comps {
        n_total = values.len() as f64;
        let spec = plan.forward(values);
        for (flat, z) in spec.iter().enumerate() {
            let k2: f64 = plan.wavevector(flat).iter().map(|k| k * k).sum();
            acc += z.norm_sqr() / (1.0 + k2);
        }
    }
    (volume * acc / (n_total * n_total)).sqrt()
}

pub fn sup_h_minus1(f: &GridField) -> Result<f64> {
    let plan = SpectralPlan::new(&f.grid);
    sup_over(f, 0, f.grid.nt, |it| h_minus1_with(&plan, f, it))
}

/// `(int r_max(x)^2 j_{K(x)}(u(x))^2 dx)^{1/2}` on one slice.
pub fn weighted_l2k_norm(u: &GridField, bodies: &GridField, it: usize) -> Result<f64> {
    u.check_compatible(bodies)?;
    check_slice(u, it)?;
    let ns = u.grid.n_space();
    let mut acc = 0.0;
    for s in 0..ns {
        let node = it * ns + s;
        let body = bodies.body(node)?;
        let r_max = body.r_max();
        acc += (r_max * body.gauge(u.at(node))).powi(2);
    }
    Ok((u.grid.cell_volume() * acc).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JReport {
    pub value: f64,
    pub profile: Vec<f64>,
    pub argmax: usize,
}

impl JReport {
    pub fn from_profile(profile: Vec<f64>) -> Self {
        let (argmax, value) = profile.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        JReport { value, profile, argmax }
    }
}

/// Integrated gap `e - j_K(v - v0)^2` of one node (translation-free lens bodies).
#[inline]
pub fn node_gap(v: &[f64], v0: &[f64], body: &[f64], e: f64) -> f64 {
    let n = v.len();
    let mut p = [0.0f64; 3];
    for k in 0..n {
        p[k] = v[k] - v0[k];
    }
    let j = lens_gauge(&body[..n], body[n], body[n + 1], &p[..n]);
    e - j * j
}

/// `sup_t int (e - j_K(v - v0)^2) dx` with its per-slice profile; `v`, `v0` may be velocity or state fields.
pub fn j_functional(v: &GridField, v0: &GridField, bodies: &GridField, e: &GridField) -> Result<JReport> {
    v.check_compatible(v0)?;
    v.check_compatible(bodies)?;
    v.check_compatible(e)?;
    if bodies.kind != FieldKind::Body || e.kind != FieldKind::Scalar {
        return Err(Error::invalid("J needs a body field and a scalar energy field"));
    }
    let g = v.grid;
    let ns = g.n_space();
    let dv = g.cell_volume();
    let profile: Vec<f64> = (0..g.nt)
        .into_par_iter()
        .map(|it| {
            let mut acc = 0.0;
            for s in 0..ns {
                let node = it * ns + s;
                acc += node_gap(&v.at(node)[..g.dim], &v0.at(node)[..g.dim], bodies.at(node), e.at(node)[0]);
            }
            acc * dv
        })
        .collect();
    Ok(JReport::from_profile(profile))
}

/// Fourth-order centered time derivative of component data at interior slice `it` (`2 <= it < nt - 2`).
fn time_derivative(f: &GridField, it: usize, c: usize) -> Vec<f64> {
    let h = f.grid.dt();
    let s = |k: usize| slice_component(f, k, c);
    let (m2, m1, p1, p2) = (s(it - 2), s(it - 1), s(it + 1), s(it + 2));
    (0..m1.len()).map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Sup over interior slices of the L2 norm of `d_t v + div M + grad q`.
    pub momentum: f64,
    /// Sup over interior slices of the L2 norm of `div v`.
    pub divergence: f64,
}

/// Residuals of the linear relaxed system for a state field.
pub fn linear_system_residual(z: &GridField) -> Result<ResidualReport> {
    if z.kind != FieldKind::State {
        return Err(Error::invalid("linear system residual needs a state field"));
    }
    let g = z.grid;
    let n = g.dim;
    let plan = SpectralPlan::new(&g);
    let dv = g.cell_volume();
    let per: Vec<(f64, f64)> = (2..g.nt - 2)
        .into_par_iter()
        .map(|it| {
            let mut mom = 0.0;
            for i in 0..n {
                let mut r = time_derivative(z, it, i);
                for j in 0..n {
                    let d = plan.derivative(&slice_component(z, it, n + sym_index(n, i, j)), j);
                    r.iter_mut().zip(&d).for_each(|(a, b)| *a += b);
                }
                let dq = plan.derivative(&slice_component(z, it, n + sym_len(n)), i);
                r.iter_mut().zip(&dq).for_each(|(a, b)| *a += b);
                mom += r.iter().map(|x| x * x).sum::<f64>();
            }
            let mut div = vec![0.0; g.n_space()];
            for i in 0..n {
                let d = plan.derivative(&slice_component(z, it, i), i);
                div.iter_mut().zip(&d).for_each(|(a, b)| *a += b);
            }
            ((mom * dv).sqrt(), (div.iter().map(|x| x * x).sum::<f64>() * dv).sqrt())
        })
        .collect();
    Ok(ResidualReport {
        momentum: per.iter().map(|p| p.0).fold(0.0, f64::max),
        divergence: per.iter().map(|p| p.1).fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcingReport {
    pub l2: f64,
    pub h_minus1: f64,
}

/// Sup over slices of the L2 and H^{-1} norms of `f = div(F(v) - M)`.
pub fn forcing_residual(z: &GridField) -> Result<ForcingReport> {
    if z.kind != FieldKind::State {
        return Err(Error::invalid("forcing residual needs a state field"));
    }
    let g = z.grid;
    let n = g.dim;
    let plan = SpectralPlan::new(&g);
    let ns = g.n_space();
    let per: Vec<(f64, f64)> = (0..g.nt)
        .into_par_iter()
        .map(|it| {
            // Defect D = F(v) - M per node, component-major.
            let mut defect = vec![vec![0.0; ns]; sym_len(n)];
            let mut fbuf = vec![0.0; sym_len(n)];
            for s in 0..ns {
                let zn = z.at(it * ns + s);
                f_map_into(&zn[..n], &mut fbuf);
                for k in 0..sym_len(n) {
                    defect[k][s] = fbuf[k] - zn[n + k];
                }
            }
            let mut force = Vec::with_capacity(n);
            for i in 0..n {
                let mut fi = vec![0.0; ns];
                for j in 0..n {
                    let d = plan.derivative(&defect[sym_index(n, i, j)], j);
                    fi.iter_mut().zip(&d).for_each(|(a, b)| *a += b);
                }
                force.push(fi);
            }
            let l2 = (g.cell_volume() * force.iter().flatten().map(|x| x * x).sum::<f64>()).sqrt();
            (l2, h_minus1_raw(&plan, &force, g.volume()))
        })
        .collect();
    Ok(ForcingReport { l2: per.iter().map(|p| p.0).fold(0.0, f64::max), h_minus1: per.iter().map(|p| p.1).fold(0.0, f64::max) })
}
