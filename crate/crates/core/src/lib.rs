//! Stratification of the moduli space of n x n complex matrices under
//! scalar similarity, and of complex bilinear forms under congruence in
//! dimensions up to 3.
//!
//! The library provides exact Gaussian-rational and tolerance-tagged float
//! arithmetic, Jordan-structure extraction, stratum enumeration and
//! classification, Arnold parameter counts and miniversal complements,
//! deformation graphs, the matrix-to-Lie-algebra and form-to-associative
//! extension constructions, and congruence certificates for bilinear forms.

pub mod bilinear;
pub mod deformation;
pub mod error;
pub mod graph;
pub mod jordan;
pub mod lie;
pub mod matrix;
pub mod poly;
pub mod rng;
pub mod scalar;
pub mod strata;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::{Backend, Scalar};
