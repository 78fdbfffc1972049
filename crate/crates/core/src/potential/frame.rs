use crate::error::{Error, Result};
use crate::relaxation::{is_aligned, lambda_from_pair, LambdaDirection};
use crate::vecops::{dot, gram_defect, norm2, wedge};
use serde::{Deserialize, Serialize};

/// Plane-wave data `(delta, xi, c)` attached to a non-aligned pair `(a, b)` and amplitude `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFrame {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub t: f64,
    pub delta: f64,
    pub xi: Vec<f64>,
    pub c: f64,
}

/// `delta = cbrt(-t / ((|a|^2|b|^2 - (a.b)^2)^2 |b-a|^2))`, `xi = delta((|b|^2 - a.b) a + (|a|^2 - a.b) b)`, `c = -xi.a`.
pub fn make_frame(a: &[f64], b: &[f64], t: f64) -> Result<WaveFrame> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!("t must be finite and nonnegative, got {t}")));
    }
    if is_aligned(a, b) {
        return Err(Error::Alignment);
    }
    if t == 0.0 {
        return Ok(WaveFrame::zero(a, b));
    }
    let g = gram_defect(a, b);
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (y - x) * (y - x)).sum();
    let delta = (-t / (g * g * d2)).cbrt();
    // (|b|^2 - a.b) a + (|a|^2 - a.b) b = (a b^T - b a^T)(b - a), summed over minors.
    let xi: Vec<f64> =
        (0..a.len()).map(|i| delta * (0..a.len()).map(|j| wedge(a, b, i, j) * (b[j] - a[j])).sum::<f64>()).collect();
    let c = -dot(&xi, a);
    Ok(WaveFrame { a: a.to_vec(), b: b.to_vec(), t, delta, xi, c })
}

impl WaveFrame {
    /// Sentinel for `t = 0`: every output vanishes.
    pub fn zero(a: &[f64], b: &[f64]) -> Self {
        WaveFrame { a: a.to_vec(), b: b.to_vec(), t: 0.0, delta: 0.0, xi: vec![0.0; a.len()], c: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn is_zero(&self) -> bool {
        self.t == 0.0
    }

    pub fn lambda(&self) -> Result<LambdaDirection> {
        lambda_from_pair(&self.a, &self.b, self.t)
    }

    /// Relative residuals of the four frame identities, in declaration order:
    /// the cube equation for `delta`, `c = -xi.a = -xi.b`, `|xi|^2 = -delta |a-b|^2 c`, `c^2 delta |b-a|^2 = -t`.
    pub fn identity_residuals(&self) -> [f64; 4] {
        if self.is_zero() {
            return [0.0; 4];
        }
        let g = gram_defect(&self.a, &self.b);
        let d2: f64 = self.a.iter().zip(&self.b).map(|(x, y)| (y - x) * (y - x)).sum();
        let t = self.t;
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE);
        let xa = -dot(&self.xi, &self.a);
        let xb = -dot(&self.xi, &self.b);
        [
            rel(self.delta.powi(3) * g * g * d2, -t),
            rel(xa, self.c).max(rel(xb, self.c)),
            rel(norm2(&self.xi), -self.delta * d2 * self.c),
            rel(self.c * self.c * self.delta * d2, -t),
        ]
    }
}
