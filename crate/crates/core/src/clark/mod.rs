//! Measures on the unit circle and the Cauchy-transform machinery of
//! Aleksandrov–Clark theory.

mod boundary;
mod measure;
mod spectral;
mod transform;

pub use boundary::{
    jump_report, poltoratski_limit, privalov_jump, theta_boundary_at_singular, AtomBoundary, JumpReport, PrivalovJump,
    ATOM_EXCLUSION, DEGENERATE_CAUCHY,
};
pub use measure::{Atom, CircleMeasure, Density, DEFAULT_GRID, PROBABILITY_TOL};
pub use spectral::{
    ak_residual, atomwise_norm2, clark_unitary_matrix, finite_spectral_measure, herglotz_residual, spectral_transport,
    Transported, CYCLIC_OVERLAP_TOL, MERGE_TOL,
};
pub use transform::{
    cauchy_transform, clark_density, normalized_cauchy, theta_beta_from_measure, theta_from_measure, WeightFn,
    CIRCLE_GAP, VANISHING_TRANSFORM,
};
