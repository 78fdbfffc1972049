//! Paths between discrete Euler solutions.
//!
//! Two solution fields are mollified and averaged. Both mollified velocities
//! are wrapped in a lens whose radius absorbs the measured mollification
//! defect, and the engine pushes the average toward its constraint set. The
//! result lies within `gap / sqrt 2 + delta` of each parent. Recursing on
//! dyadic halves gives a path whose Hölder-1/2 constant is bounded by a
//! geometric series of the measured `delta`s.

mod fixtures;
mod midpoint;
mod path;

pub use fixtures::{FixtureSpec, SolutionFixture, FIXTURE_RESIDUAL_TOL};
pub use midpoint::{interior_window, midpoint, velocity_distance, Midpoint, MidpointConfig, MidpointReport};
pub use path::{
    dyadic_path, holder_budget, holder_report, write_manifest, HolderReport, HolderRow, Manifest, ManifestEntry, PathNode,
    MAX_DEPTH,
};
