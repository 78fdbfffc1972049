use crate::error::{Error, Result};
use crate::vecops::{all_finite, dot, norm2};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Number of stored entries of a symmetric `n x n` matrix.
#[inline]
pub const fn sym_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Row-major upper-triangle position of entry `(i, j)`.
#[inline]
pub fn sym_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Largest eigenvalue of a symmetric 2x2 or 3x3 matrix given by its upper triangle.
pub fn sym_max_eigenvalue(n: usize, m: &[f64]) -> f64 {
    match n {
        2 => {
            let (a, b, c) = (m[0], m[1], m[2]);
            let h = 0.5 * (a - c);
            0.5 * (a + c) + (h * h + b * b).sqrt()
        }
        3 => {
            let (a00, a01, a02, a11, a12, a22) = (m[0], m[1], m[2], m[3], m[4], m[5]);
            let p1 = a01 * a01 + a02 * a02 + a12 * a12;
            let q = (a00 + a11 + a22) / 3.0;
            let (d0, d1, d2) = (a00 - q, a11 - q, a22 - q);
            let p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
            if p2 == 0.0 {
                return q;
            }
            let p = (p2 / 6.0).sqrt();
            let (b00, b01, b02, b11, b12, b22) = (d0 / p, a01 / p, a02 / p, d1 / p, a12 / p, d2 / p);
            let det = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) + b02 * (b01 * b12 - b11 * b02);
            let r = (0.5 * det).clamp(-1.0, 1.0);
            q + 2.0 * p * (r.acos() / 3.0).cos()
        }
        _ => {
            let mut full = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    full[(i, j)] = m[sym_index(n, i, j)];
                    full[(j, i)] = m[sym_index(n, i, j)];
                }
            }
            nalgebra::SymmetricEigen::new(full).eigenvalues.max()
        }
    }
}

/// `F(u) = u (x) u - |u|^2/n I` written into an upper-triangle buffer.
pub fn f_map_into(u: &[f64], out: &mut [f64]) {
    let n = u.len();
    let mean = norm2(u) / n as f64;
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            out[k] = u[i] * u[j] - if i == j { mean } else { 0.0 };
            k += 1;
        }
    }
}

/// `F(u)` as an upper triangle.
pub fn f_map(u: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; sym_len(u.len())];
    f_map_into(u, &mut out);
    out
}

/// One point `(v, M, q)` of the relaxed system; `M` symmetric trace-free, stored as an upper triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub v: Vec<f64>,
    #[serde(rename = "M_upper")]
    pub m: Vec<f64>,
    pub q: f64,
}

impl State {
    /// Validated constructor; the trace of `M` must vanish to `1e-12 |M|`.
    pub fn new(v: Vec<f64>, m: Vec<f64>, q: f64) -> Result<Self> {
        let n = v.len();
        if m.len() != sym_len(n) {
            return Err(Error::DimensionMismatch { expected: sym_len(n), got: m.len() });
        }
        if !all_finite(&v) || !all_finite(&m) || !q.is_finite() {
            return Err(Error::NonFinite("state"));
        }
        let s = State { v, m, q };
        let tr = s.trace();
        if tr.abs() > 1e-12 * s.m_norm().max(f64::MIN_POSITIVE) && tr != 0.0 {
            return Err(Error::invalid(format!("matrix part has trace {tr:e}")));
        }
        Ok(s)
    }

    pub fn zero(n: usize) -> Self {
        State { v: vec![0.0; n], m: vec![0.0; sym_len(n)], q: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// `v`, then the upper triangle of `M`, then `q`.
    pub fn components(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(Self::n_components(self.dim()));
        out.extend_from_slice(&self.v);
        out.extend_from_slice(&self.m);
        out.push(self.q);
        out
    }

    pub const fn n_components(n: usize) -> usize {
        n + sym_len(n) + 1
    }

    pub fn from_components(n: usize, c: &[f64]) -> Self {
        State { v: c[..n].to_vec(), m: c[n..n + sym_len(n)].to_vec(), q: c[n + sym_len(n)] }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[sym_index(self.dim(), i, j)]
    }

    pub fn trace(&self) -> f64 {
        let n = self.dim();
        (0..n).map(|i| self.entry(i, i)).sum()
    }

    /// Frobenius norm of `M`.
    pub fn m_norm(&self) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.entry(i, j).powi(2);
            }
        }
        s.sqrt()
    }

    pub fn m_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }

    pub fn add(&self, o: &State) -> State {
        State {
            v: self.v.iter().zip(&o.v).map(|(a, b)| a + b).collect(),
            m: self.m.iter().zip(&o.m).map(|(a, b)| a + b).collect(),
            q: self.q + o.q,
        }
    }

    pub fn sub(&self, o: &State) -> State {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> State {
        State { v: self.v.iter().map(|x| x * s).collect(), m: self.m.iter().map(|x| x * s).collect(), q: self.q * s }
    }

    /// Max-abs distance over all components.
    pub fn max_abs_diff(&self, o: &State) -> f64 {
        self.components().iter().zip(o.components()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Frobenius distance `|M - F(v)|`.
    pub fn constraint_defect(&self) -> f64 {
        let f = f_map(&self.v);
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let k = sym_index(n, i, j);
                s += (self.m[k] - f[k]).powi(2);
            }
        }
        s.sqrt()
    }
}

/// `(v, p) -> (v, F(v), p + |v|^2/n)`.
pub fn euler_to_relaxed(v: &[f64], p: f64) -> State {
    State { v: v.to_vec(), m: f_map(v), q: p + norm2(v) / v.len() as f64 }
}

/// Inverse of [`euler_to_relaxed`], defined only on the constraint set `M = F(v)`.
pub fn relaxed_to_euler(z: &State, tol: f64) -> Result<(Vec<f64>, f64)> {
    let d = z.constraint_defect();
    if d > tol {
        return Err(Error::NotOnConstraintSet(d));
    }
    Ok((z.v.clone(), z.q - norm2(&z.v) / z.dim() as f64))
}

/// The affine map `G` taking the unit constraint set of `K` to that of `v0 + rK`.
pub fn translate_hull_map(z: &State, v0: &[f64], r: f64) -> Result<State> {
    if !(r > 0.0) {
        return Err(Error::invalid(format!("scale must be positive, got {r}")));
    }
    let n = z.dim();
    let rv: Vec<f64> = z.v.iter().map(|x| r * x).collect();
    let cross = dot(v0, &rv);
    let f0 = f_map(v0);
    let mut m = vec![0.0; sym_len(n)];
    for i in 0..n {
        for j in i..n {
            let k = sym_index(n, i, j);
            let diag = if i == j { 2.0 * cross / n as f64 } else { 0.0 };
            m[k] = r * r * z.m[k] + f0[k] + v0[i] * rv[j] + rv[i] * v0[j] - diag;
        }
    }
    Ok(State {
        v: rv.iter().zip(v0).map(|(a, b)| a + b).collect(),
        m,
        q: r * r * z.q + norm2(v0) / n as f64 + 2.0 * cross / n as f64,
    })
}

/// Inverse of [`translate_hull_map`].
pub fn inverse_translate_hull_map(z: &State, v0: &[f64], r: f64) -> Result<State> {
    if !(r > 0.0) {
        return Err(Error::invalid(format!("scale must be positive, got {r}")));
    }
    let n = z.dim();
    let rv: Vec<f64> = z.v.iter().zip(v0).map(|(a, b)| a - b).collect();
    let cross = dot(v0, &rv);
    let f0 = f_map(v0);
    let mut m = vec![0.0; sym_len(n)];
    for i in 0..n {
        for j in i..n {
            let k = sym_index(n, i, j);
            let diag = if i == j { 2.0 * cross / n as f64 } else { 0.0 };
            m[k] = (z.m[k] - f0[k] - v0[i] * rv[j] - rv[i] * v0[j] + diag) / (r * r);
        }
    }
    Ok(State {
        v: rv.iter().map(|x| x / r).collect(),
        m,
        q: (z.q - norm2(v0) / n as f64 - 2.0 * cross / n as f64) / (r * r),
    })
}
