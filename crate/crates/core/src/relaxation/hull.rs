use super::state::{f_map, sym_len, sym_max_eigenvalue, State};
use crate::convex_geometry::{sample_directions, ConvexBodyView, LensBody};
use crate::error::{Error, Result};
use crate::vecops::{dot, norm, norm2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnclosingBall {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HullTolerances {
    /// Relative gauge tolerance for the boundary verdict.
    pub gauge: f64,
    /// Frobenius tolerance on `|M - F(v)|` for the boundary verdict.
    pub constraint: f64,
    /// Subtracted from the raw margin; margins within the slack are boundary.
    pub slack: f64,
    /// LP reconstruction tolerance.
    pub feasibility: f64,
    /// Relative wave-cone determinant tolerance.
    pub cone: f64,
}

impl Default for HullTolerances {
    fn default() -> Self {
        HullTolerances { gauge: 1e-9, constraint: 1e-8, slack: 1e-7, feasibility: 1e-8, cone: 1e-9 }
    }
}

/// Convex hull of `{(w, F(w), q) : w in v0 + r K}`, tested through a finite family of enclosing balls of `rK`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HullQuery {
    pub body: LensBody,
    pub base: State,
    pub scale: f64,
    pub ball_family: Vec<EnclosingBall>,
}

/// Axis-centered balls through the rim of the lens: centers `s e`, `|s| <= a`, radii `sqrt(R^2 - a^2 + s^2)`.
fn axis_family(body: &LensBody, scale: f64, interior: usize) -> Vec<EnclosingBall> {
    let a = body.half_separation();
    let r2 = body.radius().powi(2) - a * a;
    let t = body.translation();
    let e = body.axis();
    if a == 0.0 {
        return vec![EnclosingBall { center: t.iter().map(|x| scale * x).collect(), radius: scale * body.radius() }];
    }
    let m = interior + 2;
    (0..m)
        .map(|i| {
            let s = -a + 2.0 * a * (i as f64 / (m - 1) as f64);
            EnclosingBall {
                center: t.iter().zip(e).map(|(ti, ei)| scale * (ti + s * ei)).collect(),
                radius: scale * (r2 + s * s).sqrt(),
            }
        })
        .collect()
}

impl HullQuery {
    /// Default family: the two defining balls plus 32 axis-centered balls.
    pub fn new(body: LensBody, base: State, scale: f64) -> Result<Self> {
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::invalid(format!("scale must be nonnegative, got {scale}")));
        }
        if base.dim() != body.dim() {
            return Err(Error::DimensionMismatch { expected: body.dim(), got: base.dim() });
        }
        let ball_family = axis_family(&body, scale, 32);
        Ok(HullQuery { body, base, scale, ball_family })
    }

    /// Custom family; every ball must enclose `scale * body` at 512 sampled directions.
    pub fn with_family(body: LensBody, base: State, scale: f64, family: Vec<EnclosingBall>) -> Result<Self> {
        let mut q = Self::new(body, base, scale)?;
        if family.is_empty() {
            return Err(Error::EmptyBallFamily);
        }
        for ball in &family {
            for u in sample_directions(q.body.dim(), 512, 0.25) {
                let h = scale * q.body.support(&u);
                if h > dot(&ball.center, &u) + ball.radius * (1.0 + 1e-12) + 1e-12 {
                    return Err(Error::invalid(format!("ball {ball:?} does not enclose the scaled body")));
                }
            }
        }
        q.ball_family = family;
        Ok(q)
    }

    /// Raw margin `min_balls (|v|^2 + R'^2 - |v - v0 - c|^2)/n - lambda_max(v (x) v - M)`.
    pub fn raw_margin(&self, z: &State) -> Result<f64> {
        if self.ball_family.is_empty() {
            return Err(Error::EmptyBallFamily);
        }
        let n = z.dim();
        let p: Vec<f64> = z.v.iter().zip(&self.base.v).map(|(a, b)| a - b).collect();
        let v2 = norm2(&z.v);
        let rhs = self
            .ball_family
            .iter()
            .map(|b| {
                let d2: f64 = p.iter().zip(&b.center).map(|(x, c)| (x - c) * (x - c)).sum();
                (v2 + b.radius * b.radius - d2) / n as f64
            })
            .fold(f64::INFINITY, f64::min);
        let mut w = f_map(&z.v);
        let mean = v2 / n as f64;
        for i in 0..n {
            w[super::state::sym_index(n, i, i)] += mean;
        }
        for (wk, mk) in w.iter_mut().zip(&z.m) {
            *wk -= mk;
        }
        Ok(rhs - sym_max_eigenvalue(n, &w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Membership {
    Outside,
    Boundary,
    Inside(f64),
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside(_))
    }
    pub fn margin(&self) -> Option<f64> {
        match self {
            Membership::Inside(m) => Some(*m),
            _ => None,
        }
    }
}

pub fn hull_membership(z: &State, query: &HullQuery, tol: &HullTolerances) -> Result<Membership> {
    if z.dim() != query.body.dim() {
        return Err(Error::DimensionMismatch { expected: query.body.dim(), got: z.dim() });
    }
    if query.ball_family.is_empty() {
        return Err(Error::EmptyBallFamily);
    }
    let p: Vec<f64> = z.v.iter().zip(&query.base.v).map(|(a, b)| a - b).collect();
    let on_constraint = z.constraint_defect() <= tol.constraint;
    if query.scale == 0.0 {
        return Ok(if norm(&p) <= tol.gauge && on_constraint { Membership::Boundary } else { Membership::Outside });
    }
    let g = query.body.gauge(&p) / query.scale;
    if g > 1.0 + tol.gauge {
        return Ok(Membership::Outside);
    }
    if (g - 1.0).abs() <= tol.gauge && on_constraint {
        return Ok(Membership::Boundary);
    }
    let m = query.raw_margin(z)?;
    Ok(if m > tol.slack {
        Membership::Inside(m - tol.slack)
    } else if m >= -tol.slack {
        Membership::Boundary
    } else {
        Membership::Outside
    })
}

/// Raw margin against the default family of an untranslated lens `(e, a, R)` scaled by `r`.
///
/// Every family ball satisfies `R'^2 - |c|^2 = r^2 (R^2 - a^2)`, and the minimum over
/// the axis segment of the linear term sits at the two defining balls.
#[inline]
pub fn lens_hull_margin(v: &[f64], m: &[f64], v0: &[f64], axis: &[f64], a: f64, radius: f64, r: f64) -> f64 {
    let n = v.len();
    debug_assert_eq!(m.len(), sym_len(n));
    let mut p = [0.0f64; 3];
    let mut v2 = 0.0;
    let mut p2 = 0.0;
    let mut pe = 0.0;
    for i in 0..n {
        p[i] = v[i] - v0[i];
        v2 += v[i] * v[i];
        p2 += p[i] * p[i];
        pe += p[i] * axis[i];
    }
    let rhs = (v2 - p2 - 2.0 * r * a * pe.abs() + r * r * (radius * radius - a * a)) / n as f64;
    let mut w = [0.0f64; 6];
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            w[k] = v[i] * v[j] - m[k];
            k += 1;
        }
    }
    rhs - sym_max_eigenvalue(n, &w[..sym_len(n)])
}
