use thiserror::Error;

use crate::lp::FeasiblePoint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    /// The simplex iteration cap was hit. Carries the last basic feasible
    /// point when phase 2 had been reached.
    #[error("simplex did not terminate within {iterations} iterations")]
    NonTermination {
        iterations: usize,
        best: Option<FeasiblePoint>,
    },

    #[error("LP subproblem unbounded at DC iteration {iteration}; increase lambda")]
    LpUnbounded { iteration: usize },

    #[error("LP subproblem infeasible at DC iteration {iteration}")]
    LpInfeasible { iteration: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("model format version mismatch: expected {expected:?}, found {found:?}")]
    VersionMismatch { expected: String, found: String },

    #[error("corrupt model payload: {0}")]
    CorruptPayload(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
