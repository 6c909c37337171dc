use thiserror::Error;

/// Crate-wide error type.
///
/// The variants mirror the failure modes of the individual subsystems so
/// that callers (and the CLI exit-code mapping) can distinguish a definite
/// negative answer from "the search gave up" and from a usage error.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mixed scalar backends: {0}")]
    MixedBackend(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("division by zero scalar")]
    ZeroScalar,
    #[error("matrix is singular")]
    SingularG,
    #[error("characteristic polynomial has a factor irreducible over the Gaussian rationals; retry on the float backend")]
    IrreducibleFactor,
    #[error("{0} is not an eigenvalue")]
    NotAnEigenvalue(String),
    #[error("no stratum matches the Jordan structure (backend failure)")]
    Unclassifiable,
    #[error("multiple strata match the Jordan structure (internal invariant violation)")]
    AmbiguousClassification,
    #[error("witness search failed after {0} attempts (numeric degeneracy, not inequivalence)")]
    WitnessSearchFailed(u32),
    #[error("certificate search exhausted: invariants agree but no witness found within budget")]
    SearchExhausted,
    #[error("Jacobi identity violated at basis triple ({0},{1},{2})")]
    JacobiViolation(usize, usize, usize),
    #[error("associativity violated at basis triple ({0},{1},{2})")]
    AssociativityViolation(usize, usize, usize),
    #[error("invalid lambda for H_m: {0}")]
    InvalidLambda(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
