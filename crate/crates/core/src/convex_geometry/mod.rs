//! Lens bodies (intersections of two equal-radius balls) and pure balls,
//! with closed-form gauge and support functions, radii, Hausdorff distance,
//! `a_K`, and brute-force oracles for each closed form.

mod checks;
mod directions;
mod oracle;

pub use checks::{
    gauge_sq_hessian_exact, hausdorff_distance, hessian_lower_bound_check, uniform_convexity_check,
    HessianReport, UniformConvexityReport,
};
pub use directions::{orthonormal_complement, sample_directions};
pub use oracle::{a_k_bruteforce, gauge_oracle, BruteForceSampler};

use crate::error::{Error, Result};
use crate::vecops::{all_finite, dot, norm, norm2};
use serde::{Deserialize, Serialize};

/// Evaluation interface shared by all bodies containing a neighborhood of 0.
pub trait ConvexBodyView {
    fn dim(&self) -> usize;
    /// Minkowski functional `inf { r > 0 : x in rK }`.
    fn gauge(&self, x: &[f64]) -> f64;
    /// Support function `sup_{y in K} y.u`.
    fn support(&self, u: &[f64]) -> f64;
    fn r_min(&self) -> f64;
    fn r_max(&self) -> f64;
    /// Guaranteed constant `c` in `j(x+y)^2 + j(x-y)^2 >= 2 j(x)^2 + c j(y)^2`.
    fn uniform_convexity_constant(&self) -> f64;
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct LensDescriptor {
    dim: usize,
    axis: Vec<f64>,
    a: f64,
    #[serde(rename = "R")]
    radius: f64,
    #[serde(default)]
    translation: Option<Vec<f64>>,
}

/// `B(t - a e, R) ∩ B(t + a e, R)` with unit axis `e` and translation `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LensDescriptor")]
pub struct LensBody {
    dim: usize,
    axis: Vec<f64>,
    a: f64,
    #[serde(rename = "R")]
    radius: f64,
    translation: Vec<f64>,
}

impl TryFrom<LensDescriptor> for LensBody {
    type Error = Error;
    fn try_from(d: LensDescriptor) -> Result<Self> {
        if d.axis.len() != d.dim {
            return Err(Error::DimensionMismatch { expected: d.dim, got: d.axis.len() });
        }
        let body = LensBody::new(&d.axis, d.a, d.radius)?;
        match d.translation {
            Some(t) => body.translated(&t),
            None => Ok(body),
        }
    }
}

impl LensBody {
    /// Lens with axis direction `axis` (normalized here), half-separation `a`, radius `R`.
    pub fn new(axis: &[f64], a: f64, radius: f64) -> Result<Self> {
        let dim = axis.len();
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidBody(format!("dimension {dim} not in {{2, 3}}")));
        }
        if !all_finite(axis) || !a.is_finite() || !radius.is_finite() {
            return Err(Error::NonFinite("lens parameters"));
        }
        let len = norm(axis);
        if len == 0.0 {
            return Err(Error::InvalidBody("zero axis".into()));
        }
        if a < 0.0 || radius <= 0.0 || radius <= a {
            return Err(Error::InvalidBody(format!("need R > a >= 0, got a = {a}, R = {radius}")));
        }
        Ok(LensBody {
            dim,
            axis: axis.iter().map(|x| x / len).collect(),
            a,
            radius,
            translation: vec![0.0; dim],
        })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        let mut axis = vec![0.0; dim];
        if dim > 0 {
            axis[0] = 1.0;
        }
        Self::new(&axis, 0.0, radius)
    }

    /// Same body shifted by `t`; 0 must stay interior.
    pub fn translated(&self, t: &[f64]) -> Result<Self> {
        if t.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: t.len() });
        }
        if !all_finite(t) {
            return Err(Error::NonFinite("translation"));
        }
        let mut out = self.clone();
        out.translation = t.to_vec();
        for c in out.centers() {
            if norm(&c) >= out.radius {
                return Err(Error::InvalidBody("translated body does not contain a neighborhood of 0".into()));
            }
        }
        Ok(out)
    }

    /// Same shape scaled by `r > 0` about the origin.
    pub fn scaled(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!("scale must be positive, got {r}")));
        }
        let mut out = Self::new(&self.axis, self.a * r, self.radius * r)?;
        out.translation = self.translation.iter().map(|x| x * r).collect();
        Ok(out)
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }
    pub fn half_separation(&self) -> f64 {
        self.a
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn translation(&self) -> &[f64] {
        &self.translation
    }
    pub fn is_ball(&self) -> bool {
        self.a == 0.0
    }

    /// Centers of the two defining balls (equal when `a = 0`).
    pub fn centers(&self) -> [Vec<f64>; 2] {
        let lo = (0..self.dim).map(|k| self.translation[k] - self.a * self.axis[k]).collect();
        let hi = (0..self.dim).map(|k| self.translation[k] + self.a * self.axis[k]).collect();
        [lo, hi]
    }

    /// `(r_min, r_max) = (R - a, sqrt(R^2 - a^2))`, independent of translation.
    pub fn radii(&self) -> (f64, f64) {
        (self.radius - self.a, (self.radius * self.radius - self.a * self.a).sqrt())
    }

    /// Two-ball membership predicate.
    pub fn contains(&self, x: &[f64]) -> bool {
        let r2 = self.radius * self.radius;
        self.centers().iter().all(|c| {
            let d2: f64 = x.iter().zip(c).map(|(p, q)| (p - q) * (p - q)).sum();
            d2 <= r2
        })
    }

    /// Gauge with input validation.
    pub fn checked_gauge(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if !all_finite(x) {
            return Err(Error::NonFinite("gauge argument"));
        }
        Ok(self.gauge(x))
    }

    /// Normalized copy with `r_max = 1`, together with the removed factor `r_max`.
    pub fn normalized(&self) -> Result<(LensBody, f64)> {
        let (_, r_max) = self.radii();
        Ok((self.scaled(1.0 / r_max)?, r_max))
    }
}

/// Gauge of `B(c, R)` at `x` when `|c| < R`, cancellation-free in both branches.
#[inline]
pub fn ball_gauge(center: &[f64], radius: f64, x: &[f64]) -> f64 {
    let xc = dot(x, center);
    let x2 = norm2(x);
    let k = radius * radius - norm2(center);
    let s = (xc * xc + k * x2).sqrt();
    if xc > 0.0 {
        if x2 == 0.0 {
            0.0
        } else {
            x2 / (xc + s)
        }
    } else {
        (s - xc) / k
    }
}

/// Gauge of the untranslated lens `(e, a, R)`: `(a|x.e| + sqrt(a^2 (x.e)^2 + (R^2-a^2)|x|^2)) / (R^2-a^2)`.
#[inline]
pub fn lens_gauge(axis: &[f64], a: f64, radius: f64, x: &[f64]) -> f64 {
    let x1 = dot(x, axis).abs();
    let k = radius * radius - a * a;
    (a * x1 + (a * a * x1 * x1 + k * norm2(x)).sqrt()) / k
}

impl ConvexBodyView for LensBody {
    fn dim(&self) -> usize {
        self.dim
    }

    fn gauge(&self, x: &[f64]) -> f64 {
        if self.translation.iter().all(|&t| t == 0.0) {
            return lens_gauge(&self.axis, self.a, self.radius, x);
        }
        let [c0, c1] = self.centers();
        ball_gauge(&c0, self.radius, x).max(ball_gauge(&c1, self.radius, x))
    }

    fn support(&self, u: &[f64]) -> f64 {
        let len = norm(u);
        let shift = dot(&self.translation, u);
        if len == 0.0 {
            return 0.0;
        }
        let u1 = dot(u, &self.axis).abs() / len;
        let shape = if u1 >= self.a / self.radius {
            self.radius - self.a * u1
        } else {
            let perp = (1.0 - u1 * u1).max(0.0).sqrt();
            (self.radius * self.radius - self.a * self.a).sqrt() * perp
        };
        len * shape + shift
    }

    fn r_min(&self) -> f64 {
        self.radii().0
    }

    fn r_max(&self) -> f64 {
        self.radii().1
    }

    fn uniform_convexity_constant(&self) -> f64 {
        let (r_min, r_max) = self.radii();
        (r_min * r_min) / (r_max * r_max)
    }
}

/// Gauge with input validation.
pub fn gauge(body: &LensBody, x: &[f64]) -> Result<f64> {
    body.checked_gauge(x)
}

/// `(r_min, r_max)` of the untranslated body.
pub fn radii(body: &LensBody) -> (f64, f64) {
    body.radii()
}

/// `inf (R'^2 - |u|^2)` over balls `B(u, R')` enclosing the lens; equals `R^2 - a^2`.
pub fn a_k(body: &LensBody) -> Result<f64> {
    if body.translation.iter().any(|&t| t != 0.0) {
        return Err(Error::InvalidBody("a_K requires an untranslated body".into()));
    }
    Ok(body.radius * body.radius - body.a * body.a)
}
