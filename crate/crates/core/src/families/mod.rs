//! Explicit metric families and their verifiers: diagonal nonsingular
//! pencils, two-component flat pencils, conformal examples, Frobenius
//! potentials, vector potentials, flat-pencil conditions in flat coordinates,
//! and the Gauss-Peterson-Codazzi equations.

mod conformal;
mod diagonal;
mod frobenius;
mod gpc;
mod potential;
mod two_component;

pub use conformal::{
    conformal_metric, harmonic_example, laplacian, liouville_check, liouville_example, liouville_factor,
    liouville_residual, with_euclidean,
};
pub use diagonal::{diagonal_pencil, DiagonalPencilSpec};
pub use frobenius::{check_2d_linear_pde, check_m2, frobenius_pair, Eta, FrobeniusSpec};
pub use gpc::{
    constant_curvature_weingarten, gpc_residual, holonomic_residual, GpcResiduals, HolonomicResiduals,
    WeingartenSet, COMMUTATOR_TOL,
};
pub use potential::{metric_from_vector_potential, verify_dubrovin_pencil, DubrovinInput};
pub use two_component::{two_component_family, verify_lame_system, verify_lequa, TwoComponentSpec};
