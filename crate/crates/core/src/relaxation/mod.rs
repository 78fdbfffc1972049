//! Relaxed states `z = (v, M, q)`, the map `F`, the wave cone, hull
//! membership for translated constraint sets, hull decomposition over
//! sampled boundary atoms, and oscillation-direction selection.

mod cone;
mod decompose;
mod hull;
mod state;

pub use cone::{is_aligned, lambda_from_pair, wave_cone_det, wave_cone_scale, LambdaDirection};
pub use decompose::{
    direction_from_decomposition, hull_decompose, oscillation_direction, Decomposition, OscillationConfig, OscillationResult,
};
pub use hull::{
    hull_membership, lens_hull_margin, EnclosingBall, HullQuery, HullTolerances, Membership,
};
pub use state::{
    euler_to_relaxed, f_map, f_map_into, inverse_translate_hull_map, relaxed_to_euler, sym_index,
    sym_len, sym_max_eigenvalue, translate_hull_map, State,
};
