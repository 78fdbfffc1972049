//! Numerical laboratory for the constructive layers of convex integration
//! applied to the relaxed incompressible Euler system.
//!
//! Layers, bottom to top:
//! - [`convex_geometry`]: lens bodies, gauges, support functions, `a_K`.
//! - [`relaxation`]: relaxed states `(v, M, q)`, wave cone, hull tests.
//! - [`potential`]: the third-order potential operator and localized waves.
//! - [`fields`]: periodic space-time grids, norms, mollifiers.
//! - [`engine`]: subsolution states and the tiled improvement step.
//! - [`pathctl`]: midpoints between solutions and dyadic Hölder paths.

pub mod convex_geometry;
pub mod engine;
pub mod error;
pub mod fields;
pub mod pathctl;
pub mod potential;
pub mod relaxation;
pub mod vecops;

pub use error::{Error, Result};
