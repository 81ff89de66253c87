use thiserror::Error;

use crate::lsq::SolveDiagnostics;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation point t = {0} lies outside [-1, 1]")]
    Domain(f64),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "conjugate gradient did not converge in {} iterations (relative residual {:.3e})",
        .0.iterations,
        .0.final_relative_residual
    )]
    NotConverged(SolveDiagnostics),

    #[error("inner linear solve failed: {0}")]
    InnerSolve(String),

    #[error("reference oracle rejected: {0}")]
    OracleValidation(String),

    #[error("fixed-point iteration diverged after {iterations} iterations")]
    Diverged { iterations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
