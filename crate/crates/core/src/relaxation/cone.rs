use super::state::{f_map, sym_index, State};
use crate::error::{Error, Result};
use crate::vecops::{all_finite, gram_defect, norm2};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

fn cone_matrix(z: &State) -> DMatrix<f64> {
    let n = z.dim();
    let mut u = DMatrix::<f64>::zeros(n + 1, n + 1);
    for i in 0..n {
        u[(i, 0)] = z.v[i];
        for j in 0..n {
            u[(i, j + 1)] = z.m[sym_index(n, i, j)] + if i == j { z.q } else { 0.0 };
        }
        u[(n, i + 1)] = z.v[i];
    }
    u
}

/// Determinant of `[[v, M + qI], [0, v^T]]`; vanishes exactly on the wave cone.
pub fn wave_cone_det(z: &State) -> f64 {
    cone_matrix(z).determinant()
}

/// Product of the row norms of the block matrix (Hadamard bound on `|det|`).
pub fn wave_cone_scale(z: &State) -> f64 {
    let u = cone_matrix(z);
    u.row_iter().map(|r| r.norm()).product()
}

/// A wave-cone direction `t (b - a, F(b) - F(a), (|b|^2 - |a|^2)/n)` with its generating pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaDirection {
    pub state: State,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub t: f64,
}

impl LambdaDirection {
    /// Relative cone residual `|det| / scale` (0 for the zero direction).
    pub fn cone_residual(&self) -> f64 {
        let s = wave_cone_scale(&self.state);
        if s == 0.0 {
            0.0
        } else {
            wave_cone_det(&self.state).abs() / s
        }
    }

    /// Same pair with `t` multiplied by `s`.
    pub fn rescaled(&self, s: f64) -> LambdaDirection {
        LambdaDirection { state: self.state.scale(s), a: self.a.clone(), b: self.b.clone(), t: self.t * s }
    }
}

/// Pairs with `|a|^2 |b|^2 - (a.b)^2 <= 1e-12 |a|^2 |b|^2` count as aligned.
pub fn is_aligned(a: &[f64], b: &[f64]) -> bool {
    let scale = norm2(a) * norm2(b);
    scale == 0.0 || gram_defect(a, b) <= 1e-12 * scale
}

pub fn lambda_from_pair(a: &[f64], b: &[f64], t: f64) -> Result<LambdaDirection> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    if !all_finite(a) || !all_finite(b) || !t.is_finite() {
        return Err(Error::NonFinite("pair"));
    }
    if t < 0.0 {
        return Err(Error::invalid(format!("t must be nonnegative, got {t}")));
    }
    if is_aligned(a, b) {
        return Err(Error::Alignment);
    }
    let n = a.len();
    let (fa, fb) = (f_map(a), f_map(b));
    let state = State {
        v: a.iter().zip(b).map(|(x, y)| t * (y - x)).collect(),
        m: fa.iter().zip(&fb).map(|(x, y)| t * (y - x)).collect(),
        q: t * (norm2(b) - norm2(a)) / n as f64,
    };
    Ok(LambdaDirection { state, a: a.to_vec(), b: b.to_vec(), t })
}
