use num_complex::Complex64;
use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("pole at z = {at}")]
    Pole { at: Complex64 },

    #[error("theta series overflow at u = {u}")]
    Overflow { u: Complex64 },

    #[error("theta series needs more than {max_terms} terms at u = {u}")]
    Truncation { u: Complex64, max_terms: usize },

    #[error("w = {at} lies on a branch cut")]
    BranchCut { at: Complex64 },

    #[error("square-root branch is ambiguous at z = {at} (argument {value})")]
    BranchAmbiguity { at: Complex64, value: Complex64 },

    #[error("quadrature did not converge: partial result {partial}, error estimate {error}")]
    NonConvergence { partial: f64, error: f64 },

    #[error("unknown map `{0}`")]
    UnknownMap(String),
}

pub type Result<T> = std::result::Result<T, Error>;
