use super::frame::WaveFrame;
use super::jet::{index_of, order_of, Jet, JetSpace, MultiIndex};
use crate::error::{Error, Result};
use crate::relaxation::{sym_len, State};
use crate::vecops::norm2;
use std::collections::BTreeMap;

/// Linear combination of partial derivatives.
pub type DerivativeRow = BTreeMap<MultiIndex, f64>;

fn push(row: &mut DerivativeRow, vars: &[usize], c: f64) {
    if c != 0.0 {
        *row.entry(index_of(vars)).or_insert(0.0) += c;
    }
}

fn shifted(row: &DerivativeRow, var: usize) -> DerivativeRow {
    row.iter()
        .map(|(m, &c)| {
            let mut s = *m;
            s[var] += 1;
            (s, c)
        })
        .collect()
}

fn accumulate(into: &mut DerivativeRow, from: &DerivativeRow) {
    for (m, c) in from {
        *into.entry(*m).or_insert(0.0) += c;
    }
}

/// The third-order potential for the pair `(a, b)`, one derivative row per output
/// component in `State` layout (`v`, upper triangle of `M`, `q`). Variable 0 is time.
#[derive(Debug, Clone)]
pub struct PotentialOperator {
    pub n: usize,
    pub rows: Vec<DerivativeRow>,
}

impl PotentialOperator {
    pub fn new(a: &[f64], b: &[f64]) -> Self {
        let n = a.len();
        let x = |k: usize| k + 1;
        let mut rows = Vec::with_capacity(n + sym_len(n) + 1);
        // A_v = grad (b.grad)^2 - grad (a.grad)^2 + a (a.grad) Lap - b (b.grad) Lap
        for i in 0..n {
            let mut r = DerivativeRow::new();
            for k in 0..n {
                for l in 0..n {
                    push(&mut r, &[x(i), x(k), x(l)], b[k] * b[l] - a[k] * a[l]);
                    push(&mut r, &[x(k), x(l), x(l)], a[i] * a[k] - b[i] * b[k]);
                }
            }
            rows.push(r);
        }
        // A_M = (b (x) b - a (x) a + (|a|^2 - |b|^2)/n I) d_t Lap
        let shift = (norm2(a) - norm2(b)) / n as f64;
        for i in 0..n {
            for j in i..n {
                let c = b[i] * b[j] - a[i] * a[j] + if i == j { shift } else { 0.0 };
                let mut r = DerivativeRow::new();
                for l in 0..n {
                    push(&mut r, &[0, x(l), x(l)], c);
                }
                rows.push(r);
            }
        }
        // A_q = (|b|^2 - |a|^2)/n d_t Lap + d_t (a.grad)^2 - d_t (b.grad)^2
        let mut r = DerivativeRow::new();
        for l in 0..n {
            push(&mut r, &[0, x(l), x(l)], -shift);
        }
        for k in 0..n {
            for l in 0..n {
                push(&mut r, &[0, x(k), x(l)], a[k] * a[l] - b[k] * b[l]);
            }
        }
        rows.push(r);
        PotentialOperator { n, rows }
    }

    pub fn from_frame(frame: &WaveFrame) -> Self {
        Self::new(&frame.a, &frame.b)
    }

    /// Rows of the linear system applied to the output: momentum `d_t v + div M + grad q` (n rows), then `div v`.
    pub fn residual_rows(&self) -> Vec<DerivativeRow> {
        let n = self.n;
        let x = |k: usize| k + 1;
        let m_row = |i: usize, j: usize| &self.rows[n + crate::relaxation::sym_index(n, i, j)];
        let q_row = &self.rows[n + sym_len(n)];
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let mut r = shifted(&self.rows[i], 0);
            for j in 0..n {
                accumulate(&mut r, &shifted(m_row(i, j), x(j)));
            }
            accumulate(&mut r, &shifted(q_row, x(i)));
            out.push(r);
        }
        let mut div = DerivativeRow::new();
        for i in 0..n {
            accumulate(&mut div, &shifted(&self.rows[i], x(i)));
        }
        out.push(div);
        out
    }
}

/// Derivative rows bound to jet positions, with `alpha!` folded into the coefficients.
#[derive(Debug, Clone)]
pub struct CompiledRows {
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl CompiledRows {
    pub fn compile(rows: &[DerivativeRow], space: &JetSpace) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            let mut c = Vec::with_capacity(r.len());
            for (m, &coef) in r {
                let pos = space.position(m).ok_or(Error::JetOrder { need: order_of(m), have: space.order() })?;
                c.push((pos, coef * space.factorial(pos)));
            }
            out.push(c);
        }
        Ok(CompiledRows { rows: out })
    }

    pub fn apply_into(&self, jet: &Jet, out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().map(|&(p, c)| c * jet.coeffs[p]).sum();
        }
    }

    pub fn apply(&self, jet: &Jet) -> Vec<f64> {
        let mut out = vec![0.0; self.rows.len()];
        self.apply_into(jet, &mut out);
        out
    }
}

/// `(A_v phi, A_M phi, A_q phi)` at the expansion point of `phi`.
pub fn apply_potential(frame: &WaveFrame, space: &JetSpace, phi: &Jet) -> Result<State> {
    if space.nvars() != frame.dim() + 1 {
        return Err(Error::DimensionMismatch { expected: frame.dim() + 1, got: space.nvars() });
    }
    if space.order() < 3 {
        return Err(Error::JetOrder { need: 3, have: space.order() });
    }
    let op = PotentialOperator::from_frame(frame);
    let out = CompiledRows::compile(&op.rows, space)?.apply(phi);
    Ok(State::from_components(frame.dim(), &out))
}

/// Momentum residual (n entries) and divergence of `A(grad) phi`; needs order-4 jets.
pub fn potential_residual(frame: &WaveFrame, space: &JetSpace, phi: &Jet) -> Result<(Vec<f64>, f64)> {
    if space.order() < 4 {
        return Err(Error::JetOrder { need: 4, have: space.order() });
    }
    let op = PotentialOperator::from_frame(frame);
    let out = CompiledRows::compile(&op.residual_rows(), space)?.apply(phi);
    let n = frame.dim();
    Ok((out[..n].to_vec(), out[n]))
}
