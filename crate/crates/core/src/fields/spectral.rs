use super::grid::GridSpec;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// n-dimensional periodic FFTs over one spatial slice, by successive 1D passes.
#[derive(Clone)]
pub struct SpectralPlan {
    pub nx: usize,
    pub dim: usize,
    pub period: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl SpectralPlan {
    pub fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        SpectralPlan {
            nx: grid.nx,
            dim: grid.dim,
            period: grid.period,
            fwd: planner.plan_fft_forward(grid.nx),
            inv: planner.plan_fft_inverse(grid.nx),
        }
    }

    fn pass(&self, data: &mut [Complex<f64>], inverse: bool) {
        let n = self.nx;
        let total = data.len();
        let mut line = vec![Complex::new(0.0, 0.0); n];
        let plan = if inverse { &self.inv } else { &self.fwd };
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            for base in 0..total {
                // Visit each line once: its first element has index 0 along `axis`.
                if (base / stride) % n != 0 {
                    continue;
                }
                for k in 0..n {
                    line[k] = data[base + k * stride];
                }
                plan.process(&mut line);
                for k in 0..n {
                    data[base + k * stride] = line[k];
                }
            }
        }
    }

    /// Unnormalized forward transform.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex<f64>> {
        let mut c: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.pass(&mut c, false);
        c
    }

    /// Inverse transform including the `1/N` factor; returns real parts.
    pub fn inverse(&self, mut c: Vec<Complex<f64>>) -> Vec<f64> {
        self.pass(&mut c, true);
        let scale = 1.0 / c.len() as f64;
        c.iter().map(|z| z.re * scale).collect()
    }

    /// Signed integer mode per FFT index; the Nyquist index maps to `+nx/2`.
    pub fn mode(&self, k: usize) -> i64 {
        if k <= self.nx / 2 {
            k as i64
        } else {
            k as i64 - self.nx as i64
        }
    }

    /// Angular wavenumber vector `2 pi m / L` of a flat spectral index.
    pub fn wavevector(&self, flat: usize) -> Vec<f64> {
        let mut rest = flat;
        let mut m = vec![0.0; self.dim];
        for k in (0..self.dim).rev() {
            m[k] = 2.0 * PI * self.mode(rest % self.nx) as f64 / self.period;
            rest /= self.nx;
        }
        m
    }

    /// Spectral partial derivative along `axis`; the Nyquist mode is dropped.
    pub fn derivative(&self, values: &[f64], axis: usize) -> Vec<f64> {
        let mut c = self.forward(values);
        let mut rest_stride = self.nx.pow((self.dim - 1 - axis) as u32);
        if rest_stride == 0 {
            rest_stride = 1;
        }
        for (flat, z) in c.iter_mut().enumerate() {
            let idx = (flat / rest_stride) % self.nx;
            if self.nx % 2 == 0 && idx == self.nx / 2 {
                *z = Complex::new(0.0, 0.0);
                continue;
            }
            let k = 2.0 * PI * self.mode(idx) as f64 / self.period;
            *z *= Complex::new(0.0, k);
        }
        self.inverse(c)
    }
}
