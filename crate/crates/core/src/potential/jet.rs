//! Dense truncated Taylor jets in up to four variables `(t, x_1, .., x_n)`.

use crate::error::{Error, Result};

/// Exponents per variable; unused trailing slots are zero.
pub type MultiIndex = [u8; 4];

pub fn order_of(m: &MultiIndex) -> usize {
    m.iter().map(|&k| k as usize).sum()
}

/// Multi-index of the derivative `d_{v_1} .. d_{v_k}`.
pub fn index_of(vars: &[usize]) -> MultiIndex {
    let mut m = [0u8; 4];
    for &v in vars {
        m[v] += 1;
    }
    m
}

fn factorial(k: u8) -> f64 {
    (1..=k as u32).map(f64::from).product()
}

/// Index tables shared by all jets with the same variable count and order.
#[derive(Debug, Clone)]
pub struct JetSpace {
    nvars: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    /// `alpha!` per position; `d^alpha f = alpha! c_alpha`.
    factorials: Vec<f64>,
    lookup: Vec<usize>,
    products: Vec<(usize, usize, usize)>,
}

impl JetSpace {
    pub fn new(nvars: usize, order: usize) -> Self {
        assert!((1..=4).contains(&nvars), "jets support 1 to 4 variables");
        let radix = order + 1;
        let mut indices = Vec::new();
        let total = radix.pow(nvars as u32);
        let mut lookup = vec![usize::MAX; total];
        // Graded order: all indices of order 0, then 1, and so on.
        for deg in 0..=order {
            for code in 0..total {
                let mut m = [0u8; 4];
                let mut c = code;
                for slot in m.iter_mut().take(nvars) {
                    *slot = (c % radix) as u8;
                    c /= radix;
                }
                if order_of(&m) == deg {
                    lookup[code] = indices.len();
                    indices.push(m);
                }
            }
        }
        let factorials = indices.iter().map(|m| m.iter().map(|&k| factorial(k)).product()).collect();
        let mut space = JetSpace { nvars, order, indices, factorials, lookup, products: Vec::new() };
        let mut products = Vec::new();
        for (i, mi) in space.indices.iter().enumerate() {
            for (j, mj) in space.indices.iter().enumerate() {
                if order_of(mi) + order_of(mj) <= order {
                    let mut s = [0u8; 4];
                    for k in 0..4 {
                        s[k] = mi[k] + mj[k];
                    }
                    products.push((i, j, space.position(&s).unwrap()));
                }
            }
        }
        space.products = products;
        space
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn len(&self) -> usize {
        self.indices.len()
    }
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }
    pub fn factorial(&self, pos: usize) -> f64 {
        self.factorials[pos]
    }

    pub fn position(&self, m: &MultiIndex) -> Option<usize> {
        if order_of(m) > self.order || m[self.nvars..].iter().any(|&k| k != 0) {
            return None;
        }
        let radix = self.order + 1;
        let code = (0..self.nvars).rev().fold(0, |acc, k| acc * radix + m[k] as usize);
        Some(self.lookup[code])
    }

    pub fn zero(&self) -> Jet {
        Jet { coeffs: vec![0.0; self.len()] }
    }

    pub fn constant(&self, c: f64) -> Jet {
        let mut j = self.zero();
        j.coeffs[0] = c;
        j
    }

    /// Jet of the coordinate `x_var` expanded at `value`.
    pub fn variable(&self, var: usize, value: f64) -> Jet {
        let mut j = self.constant(value);
        if self.order >= 1 {
            j.coeffs[self.position(&index_of(&[var])).unwrap()] = 1.0;
        }
        j
    }

    /// Jet from a derivative oracle `alpha -> d^alpha f`.
    pub fn from_derivatives(&self, mut d: impl FnMut(&MultiIndex) -> f64) -> Jet {
        Jet { coeffs: self.indices.iter().zip(&self.factorials).map(|(m, f)| d(m) / f).collect() }
    }

    /// Tensor product `prod_k f_k(y_k)` from per-variable derivative lists `f_k^(m) / m!`.
    pub fn tensor_product(&self, taylor: &[Vec<f64>]) -> Jet {
        Jet {
            coeffs: self
                .indices
                .iter()
                .map(|m| (0..self.nvars).map(|k| taylor[k][m[k] as usize]).product())
                .collect(),
        }
    }

    /// Truncated product.
    pub fn mul(&self, a: &Jet, b: &Jet) -> Jet {
        let mut out = self.zero();
        for &(i, j, k) in &self.products {
            out.coeffs[k] += a.coeffs[i] * b.coeffs[j];
        }
        out
    }

    /// `d^alpha f` at the expansion point.
    pub fn derivative(&self, jet: &Jet, m: &MultiIndex) -> Result<f64> {
        let pos = self.position(m).ok_or(Error::JetOrder { need: order_of(m), have: self.order })?;
        Ok(jet.coeffs[pos] * self.factorials[pos])
    }
}

/// Taylor coefficients `c_alpha` in the graded order of its [`JetSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub coeffs: Vec<f64>,
}

impl Jet {
    pub fn add(&self, o: &Jet) -> Jet {
        Jet { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
    pub fn scale(&self, s: f64) -> Jet {
        Jet { coeffs: self.coeffs.iter().map(|a| a * s).collect() }
    }
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }
}
