//! Convex-integration improvement loop on a space-time cube tiling.
//!
//! A [`SubsolutionState`] holds a relaxed state field strictly inside the
//! hull of the translated constraint set at every node (or equal to the base
//! where the energy vanishes). Each round freezes cube-center data, picks a
//! wave-cone direction, and adds one localized wave per active cube. Cubes
//! are disjoint, so the sum does not depend on insertion order; it is still
//! accumulated in lexicographic cube order.

mod iterate;
mod state;
mod step;
mod tiling;

pub use iterate::{iterate, EngineConfig, RoundLog, Trajectory};
pub use state::{check_x0, node_margin, SubsolutionState, X0Report, X0Tolerances};
pub use step::{gap_field, improvement_step, StepParams, StepReport};
pub use tiling::{build_tiling, parity, Cube, Tiling};

use crate::potential::WaveDescriptor;
use serde::{Deserialize, Serialize};

/// Provenance of one inserted wave; the descriptor replays it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveRecord {
    pub round: usize,
    pub cube: Vec<i64>,
    pub descriptor: WaveDescriptor,
    pub amplitude_halvings: usize,
    /// Max analytic linear-system residual over the cube nodes.
    pub residual_max: f64,
    pub measured_c: f64,
    pub cone_residual: f64,
    pub plateau_periods: f64,
    pub slice_gain_min: f64,
}
