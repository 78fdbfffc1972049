//! Periodic space-time grid fields on the torus slab, with norms, the gap
//! functional `J`, mollification, commutator defects, residuals of the
//! linear relaxed system and a binary container format.

mod grid;
mod io;
mod mollify;
mod norms;
mod spectral;

pub use grid::{BodyField, FieldKind, GridField, GridSpec, ScalarField, StateField, VelocityField};
pub use io::{read_field, write_field};
pub use mollify::{commutator_defect, mollify, Mollifier};
pub use norms::{
    forcing_residual, h_minus1_norm, h_minus1_raw, h_minus1_with, j_functional, l2_norm, linear_system_residual,
    node_gap, slice_component, sup_h_minus1, sup_l2, sup_over, weighted_l2k_norm, ForcingReport, JReport,
    ResidualReport,
};
pub use spectral::SpectralPlan;
