use super::{sample_directions, orthonormal_complement, ConvexBodyView, LensBody};
use crate::error::{Error, Result};
use crate::vecops::{norm, norm2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gauge by bisection on `r -> [x/r in K]` using only the two-ball predicate.
pub fn gauge_oracle(body: &LensBody, x: &[f64]) -> f64 {
    if norm(x) == 0.0 {
        return 0.0;
    }
    let member = |r: f64| body.contains(&x.iter().map(|v| v / r).collect::<Vec<_>>());
    let mut hi = 1.0;
    while !member(hi) {
        hi *= 2.0;
    }
    let mut lo = hi;
    while member(lo) && lo > 1e-300 {
        lo *= 0.5;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if member(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Sampling plan for the brute-force `a_K` minimization.
///
/// Axis centers form `2^axis_level + 1` equispaced points on `[-a e, a e]`, so raising
/// the level refines the center set by nesting. The off-axis cloud is a seeded prefix.
#[derive(Debug, Clone)]
pub struct BruteForceSampler {
    pub boundary_dirs: usize,
    pub rim_points: usize,
    pub axis_level: u32,
    pub offaxis: usize,
    pub offaxis_radius: f64,
    pub seed: u64,
}

impl Default for BruteForceSampler {
    fn default() -> Self {
        BruteForceSampler {
            boundary_dirs: 4096,
            rim_points: 64,
            axis_level: 6,
            offaxis: 256,
            offaxis_radius: 0.05,
            seed: 7,
        }
    }
}

impl BruteForceSampler {
    fn boundary(&self, body: &LensBody) -> Vec<Vec<f64>> {
        let dim = body.dim();
        let mut pts: Vec<Vec<f64>> = sample_directions(dim, self.boundary_dirs, 0.5)
            .into_iter()
            .map(|d| {
                let j = body.gauge(&d);
                d.iter().map(|x| x / j).collect()
            })
            .collect();
        // Exact rim points {x.e = 0, |x| = r_max} relative to the lens center.
        let (_, r_max) = body.radii();
        let perp = orthonormal_complement(body.axis());
        let t = body.translation();
        let rim = self.rim_points.max(2);
        for k in 0..rim {
            let th = 2.0 * std::f64::consts::PI * k as f64 / rim as f64;
            let mut p = t.to_vec();
            if perp.len() == 1 {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                for i in 0..dim {
                    p[i] += s * r_max * perp[0][i];
                }
            } else {
                for i in 0..dim {
                    p[i] += r_max * (th.cos() * perp[0][i] + th.sin() * perp[1][i]);
                }
            }
            pts.push(p);
        }
        pts
    }

    fn centers(&self, body: &LensBody) -> Vec<Vec<f64>> {
        let dim = body.dim();
        let t = body.translation();
        let e = body.axis();
        let a = body.half_separation();
        let m = (1usize << self.axis_level) + 1;
        let mut out: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let s = -a + 2.0 * a * (i as f64 / (m - 1) as f64);
                (0..dim).map(|k| t[k] + s * e[k]).collect()
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.offaxis {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = self.offaxis_radius * rng.gen::<f64>();
            let len = norm(&v).max(1e-12);
            out.push((0..dim).map(|k| t[k] + r * v[k] / len).collect());
        }
        out
    }
}

/// Minimizes `R_c^2 - |c|^2` over sampled centers `c`, with `R_c` the largest
/// distance from `c` to the sampled boundary.
pub fn a_k_bruteforce(body: &LensBody, sampler: &BruteForceSampler) -> Result<f64> {
    if sampler.boundary_dirs == 0 {
        return Err(Error::invalid("empty sampler"));
    }
    let boundary = sampler.boundary(body);
    let centers = sampler.centers(body);
    let mut best = f64::INFINITY;
    for c in &centers {
        let r2 = boundary
            .iter()
            .map(|p| p.iter().zip(c).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
            .fold(0.0, f64::max);
        best = best.min(r2 - norm2(c));
    }
    Ok(best)
}
