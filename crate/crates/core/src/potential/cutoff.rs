use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// `S(u) = 35u^4 - 84u^5 + 70u^6 - 20u^7` and its derivatives through order 4; `S', S'', S'''` vanish at 0 and 1.
fn smoothstep(u: f64) -> [f64; 5] {
    let u2 = u * u;
    let u3 = u2 * u;
    [
        u2 * u2 * (35.0 - 84.0 * u + 70.0 * u2 - 20.0 * u3),
        140.0 * u3 * (1.0 - u).powi(3),
        420.0 * u2 * (1.0 - u).powi(2) * (1.0 - 2.0 * u),
        840.0 * u * (1.0 - u) * (1.0 - 5.0 * u + 5.0 * u2),
        840.0 * (1.0 - 12.0 * u + 30.0 * u2 - 20.0 * u3),
    ]
}

/// Tensor-product polynomial bump over a box in `(t, x_1, .., x_n)`: 1 on the centered
/// plateau box, 0 outside the box, `C^3` across the ramps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Plateau side over box side, per variable.
    pub plateau_fraction: f64,
}

impl CutoffProfile {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, plateau_fraction: f64) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() < 2 || lo.len() > 4 {
            return Err(Error::invalid("cutoff box needs 2 to 4 matching bounds"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(h > l)) {
            return Err(Error::invalid("degenerate cutoff box"));
        }
        if !(plateau_fraction > 0.0 && plateau_fraction < 1.0) {
            return Err(Error::invalid(format!("plateau fraction must lie in (0, 1), got {plateau_fraction}")));
        }
        Ok(CutoffProfile { lo, hi, plateau_fraction })
    }

    /// Default plateau fraction `(9/10)^(1/n)`.
    pub fn default_fraction(n: usize) -> f64 {
        0.9f64.powf(1.0 / n as f64)
    }

    pub fn nvars(&self) -> usize {
        self.lo.len()
    }

    fn ramp(&self, k: usize) -> f64 {
        0.5 * (self.hi[k] - self.lo[k]) * (1.0 - self.plateau_fraction)
    }

    /// Plateau bounds per variable.
    pub fn plateau(&self) -> (Vec<f64>, Vec<f64>) {
        let lo = (0..self.nvars()).map(|k| self.lo[k] + self.ramp(k)).collect();
        let hi = (0..self.nvars()).map(|k| self.hi[k] - self.ramp(k)).collect();
        (lo, hi)
    }

    /// Strictly inside the open box.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().enumerate().all(|(k, &y)| y > self.lo[k] && y < self.hi[k])
    }

    pub fn on_plateau(&self, p: &[f64]) -> bool {
        let (lo, hi) = self.plateau();
        p.iter().enumerate().all(|(k, &y)| y >= lo[k] && y <= hi[k])
    }

    /// Taylor coefficients `f^(m)(y)/m!`, `m <= order`, of the 1D factor in variable `k`.
    pub fn factor_taylor(&self, k: usize, y: f64, order: usize) -> Vec<f64> {
        let mut out = vec![0.0; order + 1];
        let (lo, hi, w) = (self.lo[k], self.hi[k], self.ramp(k));
        if y <= lo || y >= hi {
            return out;
        }
        if y >= lo + w && y <= hi - w {
            out[0] = 1.0;
            return out;
        }
        let (u, sign) = if y < lo + w { ((y - lo) / w, 1.0) } else { ((hi - y) / w, -1.0) };
        let s = smoothstep(u);
        let mut fact = 1.0;
        for m in 0..=order.min(4) {
            if m > 0 {
                fact *= m as f64;
            }
            out[m] = s[m] * (sign / w).powi(m as i32) / fact;
        }
        out
    }

    /// `phi(p)`.
    pub fn value(&self, p: &[f64]) -> f64 {
        (0..self.nvars()).map(|k| self.factor_taylor(k, p[k], 0)[0]).product()
    }
}
