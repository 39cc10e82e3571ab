use thiserror::Error;

use crate::oracle::IterationReport;

/// Errors raised by the algebra, solvers and scenario builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}: must lie in 1..={max}", max = crate::algebra::MAX_DIM)]
    InvalidDimension(usize),

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("singular matrix (condition estimate {condition:e})")]
    SingularMatrix { condition: f64 },

    #[error("singular loop denominator (condition estimate {condition:e})")]
    SingularDenominator { condition: f64 },

    #[error("iteration did not converge after {} iterations (last update {:e})", .0.iterations_used, .0.final_update_norm)]
    NotConverged(Box<IterationReport>),

    #[error("input state has zero norm")]
    ZeroInput,

    #[error("invalid splitter parameters: {0}")]
    InvalidSplitter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
