//! The explicit third-order potential `A(grad)` whose image solves the linear
//! relaxed system, plane-wave frames, jets, cutoffs and localized waves.

mod cutoff;
mod frame;
mod jet;
mod operator;
mod wave;

pub use cutoff::CutoffProfile;
pub use frame::{make_frame, WaveFrame};
pub use jet::{index_of, order_of, Jet, JetSpace, MultiIndex};
pub use operator::{apply_potential, potential_residual, CompiledRows, DerivativeRow, PotentialOperator};
pub use wave::{LocalizedWave, WaveDescriptor};
