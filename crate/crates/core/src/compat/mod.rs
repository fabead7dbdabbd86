//! Verdicts on metric pairs over sample grids: almost compatibility,
//! compatibility, curvature type, pencil spectrum, and the identities tying
//! the obstruction tensor `M` to the Nijenhuis tensor.

mod checks;
mod curvature;
mod grid;
mod identities;
mod spectrum;
mod verdict;

pub use checks::{
    check_almost_compatible, check_compatible, combination_ratio, default_samples, lambda_candidates,
    linearity_residual, usable_samples, LinearityResidual, COMBINATION_TOL, DEFAULT_LAMBDA_SAMPLES,
    MIN_LAMBDA_SAMPLES,
};
pub use curvature::{classify_curvature, constant_curvature_tensor, CurvatureClass, CurvatureKind};
pub use grid::{GridSummary, SampleGrid, Sampled, DEFAULT_LOCUS_TOL, MIN_SURVIVORS};
pub use identities::{identities_with_sign, lowered_nijenhuis, verify_l2_identities, IdentityResiduals};
pub use spectrum::{pencil_spectrum, PencilSpectrum, GAP_REL_TOL};
pub use verdict::{Status, Verdict, Witness, INCONCLUSIVE_FACTOR};
