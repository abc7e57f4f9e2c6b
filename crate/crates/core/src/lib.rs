//! Curvature of left-invariant pseudo-Riemannian metrics on nilpotent Lie
//! groups, with exact rational and floating-point evaluation.

pub mod attributes;
pub mod curvature;
pub mod error;
pub mod families;
pub mod liealg;
pub mod matlemmas;
pub mod matrix;
pub mod pseudolinalg;
pub mod sampling;
pub mod scalar;
pub mod search;

pub use error::{Error, Result};
pub use liealg::{central_extension, change_basis, CocycleData, LiePresentation, MetricLieAlgebra};
pub use matrix::{Mat, Vector};
pub use pseudolinalg::{MetricTensor, Subspace};
pub use scalar::{Mode, Rational, Scalar, Tolerance};
