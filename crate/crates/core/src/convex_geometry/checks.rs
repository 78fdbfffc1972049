use super::{sample_directions, ConvexBodyView, LensBody};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Sup over `n_dirs` sampled unit directions of `|h_1(u) - h_2(u)|`.
pub fn hausdorff_distance<A: ConvexBodyView, B: ConvexBodyView>(b1: &A, b2: &B, n_dirs: usize) -> Result<f64> {
    if n_dirs < 8 {
        return Err(Error::invalid(format!("n_dirs must be at least 8, got {n_dirs}")));
    }
    if b1.dim() != b2.dim() {
        return Err(Error::DimensionMismatch { expected: b1.dim(), got: b2.dim() });
    }
    Ok(sample_directions(b1.dim(), n_dirs, 0.0)
        .iter()
        .map(|u| (b1.support(u) - b2.support(u)).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformConvexityReport {
    pub pass: bool,
    /// Min over samples of `(j(x+y)^2 + j(x-y)^2 - 2 j(x)^2) / j(y)^2`.
    pub worst_ratio: f64,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// Tests the parallelogram-type inequality with constant `c` on seeded random pairs.
pub fn uniform_convexity_check<B: ConvexBodyView>(
    body: &B,
    c: f64,
    n_samples: usize,
    seed: u64,
) -> Result<UniformConvexityReport> {
    if !(c > 0.0) {
        return Err(Error::invalid(format!("c must be positive, got {c}")));
    }
    let dim = body.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let mut worst = f64::INFINITY;
    let mut worst_pair = None;
    let mut witness = None;
    for _ in 0..n_samples {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let jy = body.gauge(&y);
        if jy == 0.0 {
            continue;
        }
        let xp: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let xm: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let lhs = body.gauge(&xp).powi(2) + body.gauge(&xm).powi(2) - 2.0 * body.gauge(&x).powi(2);
        let ratio = lhs / (jy * jy);
        if ratio < worst {
            worst = ratio;
            worst_pair = Some((x.clone(), y.clone()));
        }
        if witness.is_none() && ratio < c - 1e-12 * c.max(1.0) {
            witness = Some((x, y));
        }
    }
    let pass = witness.is_none();
    Ok(UniformConvexityReport {
        pass,
        worst_ratio: worst,
        witness: if pass { None } else { witness.or(worst_pair) },
    })
}

/// Closed-form Hessian of `j^2` for the lens `(e_1, a, sqrt(1 + a^2))`, valid off `{x_1 = 0}`.
pub fn gauge_sq_hessian_exact(a: f64, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let sign = if x[0] < 0.0 { -1.0 } else { 1.0 };
    // Reflect to x_1 > 0; the Hessian transforms by the reflection on both sides.
    let mut y = x.to_vec();
    y[0] *= sign;
    let x1 = y[0];
    let s = (a * a * x1 * x1 + y.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let mut g = y.clone();
    g[0] += a * a * x1;
    let mut h = DMatrix::<f64>::identity(n, n) * 2.0;
    h[(0, 0)] += 4.0 * a * a;
    for i in 0..n {
        for j in 0..n {
            let d = if i == j { 1.0 } else { 0.0 } + if i == 0 && j == 0 { a * a } else { 0.0 };
            let mut t = x1 * (d - g[i] * g[j] / (s * s)) / s;
            if i == 0 {
                t += g[j] / s;
            }
            if j == 0 {
                t += g[i] / s;
            }
            h[(i, j)] += 2.0 * a * t;
        }
    }
    for k in 1..n {
        h[(0, k)] *= sign;
        h[(k, 0)] *= sign;
    }
    h
}

#[derive(Debug, Clone, Serialize)]
pub struct HessianReport {
    pub min_eigenvalue: f64,
    pub at: Vec<f64>,
    /// Largest entrywise gap between the finite-difference and closed-form Hessians.
    pub max_fd_error: f64,
}

/// Central finite-difference Hessian of `j^2` for the lens normalized to `R = sqrt(1 + a^2)`.
pub fn hessian_lower_bound_check(a: f64, dim: usize, points: &[Vec<f64>], h: f64) -> Result<HessianReport> {
    let mut axis = vec![0.0; dim];
    axis[0] = 1.0;
    let body = LensBody::new(&axis, a, (1.0 + a * a).sqrt())?;
    let f = |p: &[f64]| body.gauge(p).powi(2);
    let mut min_eig = f64::INFINITY;
    let mut at = Vec::new();
    let mut max_err: f64 = 0.0;
    for x in points {
        if x.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: x.len() });
        }
        if x[0].abs() < 2.0 * h {
            return Err(Error::invalid(format!("point {x:?} lies in the excluded slab |x_1| < 2h")));
        }
        let shifted = |di: Option<(usize, f64)>, dj: Option<(usize, f64)>| {
            let mut p = x.clone();
            if let Some((i, s)) = di {
                p[i] += s;
            }
            if let Some((j, s)) = dj {
                p[j] += s;
            }
            f(&p)
        };
        let f0 = f(x);
        let mut hm = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            hm[(i, i)] = (shifted(Some((i, h)), None) - 2.0 * f0 + shifted(Some((i, -h)), None)) / (h * h);
            for j in i + 1..dim {
                let v = (shifted(Some((i, h)), Some((j, h))) - shifted(Some((i, h)), Some((j, -h)))
                    - shifted(Some((i, -h)), Some((j, h)))
                    + shifted(Some((i, -h)), Some((j, -h))))
                    / (4.0 * h * h);
                hm[(i, j)] = v;
                hm[(j, i)] = v;
            }
        }
        let exact = gauge_sq_hessian_exact(a, x);
        max_err = max_err.max((&hm - &exact).amax());
        let eig = SymmetricEigen::new(hm).eigenvalues.min();
        if eig < min_eig {
            min_eig = eig;
            at = x.clone();
        }
    }
    Ok(HessianReport { min_eigenvalue: min_eig, at, max_fd_error: max_err })
}
