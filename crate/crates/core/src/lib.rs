//! Decide whether pairs of pseudo-Riemannian metrics, given as symbolic
//! contravariant components, are almost compatible, compatible, or form
//! flat or constant-curvature pencils.
//!
//! The numeric layer is generic over [`Scalar`] (`f32`/`f64`); the aliases
//! at the bottom of this file fix it to `f64`, which is what the checks are
//! tuned for.

pub mod compat;
pub mod error;
pub mod expr;
pub mod families;
pub mod linalg;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use expr::{evaluate, fd_partial, parse_expr, Expr, Point};
pub use scalar::Scalar;
pub use tensor::{MetricField, MetricPair, PencilSample, TensorValue, Variance};

pub type PointF64 = Point<f64>;
pub type TensorF64 = TensorValue<f64>;
pub type VerdictF64 = compat::Verdict<f64>;
pub type SampleGridF64 = compat::SampleGrid<f64>;
pub type CurvatureClassF64 = compat::CurvatureClass<f64>;
pub type PencilSpectrumF64 = compat::PencilSpectrum<f64>;
