use crate::vecops::{dot, norm};
use std::f64::consts::PI;

/// Deterministic unit directions: uniform angles in 2D, a Fibonacci sphere in 3D.
/// `rotation` shifts the set by a fraction of the angular spacing.
pub fn sample_directions(dim: usize, n: usize, rotation: f64) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..n)
            .map(|k| {
                let th = 2.0 * PI * (k as f64 + rotation) / n as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
                    let rho = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * k as f64 + 2.0 * PI * rotation / n as f64;
                    vec![rho * phi.cos(), rho * phi.sin(), z]
                })
                .collect()
        }
        _ => panic!("directions are defined for dimensions 2 and 3"),
    }
}

/// Orthonormal basis of the complement of unit vector `e`.
pub fn orthonormal_complement(e: &[f64]) -> Vec<Vec<f64>> {
    let n = e.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for k in 0..n {
        let mut w = vec![0.0; n];
        w[k] = 1.0;
        let p = dot(&w, e);
        for i in 0..n {
            w[i] -= p * e[i];
        }
        for b in &basis {
            let p = dot(&w, b.as_slice());
            for i in 0..n {
                w[i] -= p * b[i];
            }
        }
        let len = norm(&w);
        if len > 1e-6 {
            basis.push(w.iter().map(|x| x / len).collect::<Vec<f64>>());
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    basis
}
