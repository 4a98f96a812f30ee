use num_complex::Complex64;
use thiserror::Error;

use crate::bounds::InequalityId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: q = {q}, nu = {nu} (need 0 < q < 1 and nu > -1)")]
    InvalidParams { q: f64, nu: f64 },

    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series did not converge within {terms} terms (tail bound {tail_bound:e})")]
    TruncationFailure { terms: usize, tail_bound: f64 },

    #[error("non-finite partial sum after {terms} terms")]
    NonFinite { terms: usize },

    #[error("hypothesis of {id} fails (margin {margin:e})")]
    HypothesisViolated { id: InequalityId, margin: f64 },

    #[error("denominator {modulus:e} is below 1e-12 at z = {z}")]
    DenominatorNearZero { z: Complex64, modulus: f64 },

    #[error("Mobius transform singular for {id} at z = {z}")]
    WitnessSingular { id: InequalityId, z: Complex64 },

    #[error("invalid disk grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// Truncation and evaluation-breakdown errors, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TruncationFailure { .. }
                | Error::NonFinite { .. }
                | Error::DenominatorNearZero { .. }
                | Error::WitnessSingular { .. }
        )
    }
}
