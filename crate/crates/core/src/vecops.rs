//! Small dense vector helpers shared by the geometric layers.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm2(a).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[inline]
pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn unit(dim: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[k] = 1.0;
    e
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// `|a|^2 |b|^2 - (a.b)^2`, the squared area spanned by `a` and `b`.
#[inline]
pub fn gram_defect(a: &[f64], b: &[f64]) -> f64 {
    // Lagrange identity: sum of squared 2x2 minors, free of the cancellation in |a|^2|b|^2 - (a.b)^2.
    let mut acc = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            acc += wedge(a, b, i, j).powi(2);
        }
    }
    acc
}

/// Minor `a_i b_j - a_j b_i` of the pair.
#[inline]
pub fn wedge(a: &[f64], b: &[f64], i: usize, j: usize) -> f64 {
    a[i].mul_add(b[j], -a[j] * b[i])
}
