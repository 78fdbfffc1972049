//! Python module `eulerci`: lens bodies, wave-cone directions, frames, subsolution states,
//! the improvement engine and the dyadic path builder.
//!
//! Configs and reports cross the boundary as JSON strings with the same schema as the CLI blocks.

use eulerci_core::convex_geometry::{self as geo, ConvexBodyView, LensBody};
use eulerci_core::engine::{check_x0, iterate, EngineConfig, SubsolutionState, X0Tolerances};
use eulerci_core::fields::{forcing_residual, j_functional, GridSpec};
use eulerci_core::pathctl::{dyadic_path, holder_report, interior_window, FixtureSpec, MidpointConfig, SolutionFixture};
use eulerci_core::potential::{make_frame, WaveFrame};
use eulerci_core::relaxation::{self as rel, State};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Lens", module = "eulerci", from_py_object)]
#[derive(Clone)]
struct PyLens {
    inner: LensBody,
}

#[pymethods]
impl PyLens {
    #[new]
    #[pyo3(signature = (axis, a, radius, translation=None))]
    fn new(axis: Vec<f64>, a: f64, radius: f64, translation: Option<Vec<f64>>) -> PyResult<Self> {
        let body = LensBody::new(&axis, a, radius).map_err(err)?;
        let inner = match translation {
            Some(t) => body.translated(&t).map_err(err)?,
            None => body,
        };
        Ok(PyLens { inner })
    }

    #[staticmethod]
    fn ball(dim: usize, radius: f64) -> PyResult<Self> {
        Ok(PyLens { inner: LensBody::ball(dim, radius).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyLens { inner: serde_json::from_str(text).map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(err)
    }

    fn gauge(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.checked_gauge(&x).map_err(err)
    }

    fn gauge_oracle(&self, x: Vec<f64>) -> f64 {
        geo::gauge_oracle(&self.inner, &x)
    }

    fn support(&self, u: Vec<f64>) -> PyResult<f64> {
        if u.len() != self.inner.dim() {
            return Err(err(format!("expected {} components, got {}", self.inner.dim(), u.len())));
        }
        Ok(self.inner.support(&u))
    }

    /// `(r_min, r_max)`.
    fn radii(&self) -> (f64, f64) {
        self.inner.radii()
    }

    fn a_k(&self) -> PyResult<f64> {
        geo::a_k(&self.inner).map_err(err)
    }

    fn uniform_convexity_constant(&self) -> f64 {
        self.inner.uniform_convexity_constant()
    }

    fn hausdorff(&self, other: &PyLens, n_dirs: usize) -> PyResult<f64> {
        geo::hausdorff_distance(&self.inner, &other.inner, n_dirs).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Lens(axis={:?}, a={}, R={})", self.inner.axis(), self.inner.half_separation(), self.inner.radius())
    }
}

/// Wave-cone direction `t (b - a, F(b) - F(a), (|b|^2 - |a|^2)/n)` as `(v, m, q)`.
#[pyfunction]
fn lambda_from_pair(a: Vec<f64>, b: Vec<f64>, t: f64) -> PyResult<(Vec<f64>, Vec<f64>, f64)> {
    let s = rel::lambda_from_pair(&a, &b, t).map_err(err)?.state;
    Ok((s.v, s.m, s.q))
}

/// Block determinant whose zero set is the wave cone, and its scale.
#[pyfunction]
fn wave_cone_det(v: Vec<f64>, m: Vec<f64>, q: f64) -> PyResult<(f64, f64)> {
    let z = State::new(v, m, q).map_err(err)?;
    Ok((rel::wave_cone_det(&z), rel::wave_cone_scale(&z)))
}

#[pyclass(name = "Frame", module = "eulerci", skip_from_py_object)]
struct PyFrame {
    inner: WaveFrame,
}

#[pymethods]
impl PyFrame {
    #[new]
    fn new(a: Vec<f64>, b: Vec<f64>, t: f64) -> PyResult<Self> {
        Ok(PyFrame { inner: make_frame(&a, &b, t).map_err(err)? })
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn xi(&self) -> Vec<f64> {
        self.inner.xi.clone()
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    /// Relative residuals of the four frame identities.
    fn identity_residuals(&self) -> [f64; 4] {
        self.inner.identity_residuals()
    }
}

#[pyclass(name = "Subsolution", module = "eulerci", skip_from_py_object)]
struct PySubsolution {
    inner: SubsolutionState,
}

#[pymethods]
impl PySubsolution {
    /// Constant state `z0 = (v0, m0, q0)` on a periodic `nx^n` grid with `nt` slices over `[0, 1]`.
    #[staticmethod]
    #[pyo3(signature = (nx, nt, lens, ebar, v0=None, m0=None, q0=0.0))]
    fn constant(nx: usize, nt: usize, lens: &PyLens, ebar: f64, v0: Option<Vec<f64>>, m0: Option<Vec<f64>>, q0: f64) -> PyResult<Self> {
        let n = lens.inner.dim();
        let grid = GridSpec::new(n, nx, nt, 0.0, 1.0, 1.0).map_err(err)?;
        let z0 = State::new(v0.unwrap_or(vec![0.0; n]), m0.unwrap_or(vec![0.0; n * (n + 1) / 2]), q0).map_err(err)?;
        Ok(PySubsolution { inner: SubsolutionState::constant(grid, &z0, &lens.inner, ebar).map_err(err)? })
    }

    #[staticmethod]
    fn load(dir: &str) -> PyResult<Self> {
        Ok(PySubsolution { inner: SubsolutionState::load(std::path::Path::new(dir)).map_err(err)? })
    }

    fn save(&self, dir: &str) -> PyResult<()> {
        std::fs::create_dir_all(dir).map_err(err)?;
        self.inner.save(std::path::Path::new(dir)).map_err(err)
    }

    /// Gap functional: sup over slices of the integrated `e - j_K(v - v0)^2`.
    fn j(&self) -> PyResult<f64> {
        let s = &self.inner;
        Ok(j_functional(&s.z, &s.base, &s.bodies, &s.ebar).map_err(err)?.value)
    }

    /// `(L2, H^-1)` sup norms of `div(F(v) - M)`.
    fn forcing(&self) -> PyResult<(f64, f64)> {
        let f = forcing_residual(&self.inner.z).map_err(err)?;
        Ok((f.l2, f.h_minus1))
    }

    fn min_margin(&self) -> f64 {
        self.inner.min_margin()
    }

    fn in_x0(&self) -> PyResult<bool> {
        Ok(check_x0(&self.inner, &X0Tolerances::default()).map_err(err)?.pass)
    }

    fn wave_count(&self) -> usize {
        self.inner.waves.len()
    }

    /// Runs improvement rounds; returns the final state and the round logs as JSON.
    #[pyo3(signature = (config_json="{}"))]
    fn iterate(&self, config_json: &str) -> PyResult<(PySubsolution, String)> {
        let cfg: EngineConfig = serde_json::from_str(config_json).map_err(err)?;
        let t = iterate(self.inner.clone(), &cfg).map_err(err)?;
        let logs = serde_json::to_string(&t.logs).map_err(err)?;
        Ok((PySubsolution { inner: t.final_state }, logs))
    }
}

/// Dyadic path between two fixtures; returns the Hölder report as JSON.
#[pyfunction]
#[pyo3(signature = (nx, nt, u0_json, u1_json, depth, midpoint_json="{}"))]
fn build_path(nx: usize, nt: usize, u0_json: &str, u1_json: &str, depth: u32, midpoint_json: &str) -> PyResult<String> {
    let grid = GridSpec::new(2, nx, nt, 0.0, 1.0, 1.0).map_err(err)?;
    let spec = |s: &str| -> PyResult<FixtureSpec> { serde_json::from_str(s).map_err(err) };
    let cfg: MidpointConfig = serde_json::from_str(midpoint_json).map_err(err)?;
    let z0 = SolutionFixture::build(grid, &spec(u0_json)?).map_err(err)?.relaxed();
    let z1 = SolutionFixture::build(grid, &spec(u1_json)?).map_err(err)?.relaxed();
    let path = dyadic_path(&z0, &z1, depth, &cfg).map_err(err)?;
    let h = holder_report(&path, interior_window(&z0, cfg.eps_mollify)).map_err(err)?;
    serde_json::to_string(&h).map_err(err)
}

#[pymodule]
fn eulerci(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLens>()?;
    m.add_class::<PyFrame>()?;
    m.add_class::<PySubsolution>()?;
    m.add_function(wrap_pyfunction!(lambda_from_pair, m)?)?;
    m.add_function(wrap_pyfunction!(wave_cone_det, m)?)?;
    m.add_function(wrap_pyfunction!(build_path, m)?)?;
    Ok(())
}
