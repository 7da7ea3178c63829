use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pole collision: |z + p| = {distance:e} at z = {z}")]
    PoleCollision { z: Complex64, distance: f64 },

    #[error("tail bound {bound:e} never drops below {tol:e} within {max_index} poles")]
    Truncation { tol: f64, bound: f64, max_index: usize },

    #[error("resolvent matrix near singular at t = {t}, x = {x} (condition estimate {condition:e})")]
    Singular { t: f64, x: f64, condition: f64 },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("Jost solve at lambda = {lambda} failed after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        lambda: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("blow-up detected at t = {t}")]
    BlowUp { t: f64 },

    #[error("accuracy check failed: {0}")]
    Accuracy(String),

    #[error("initial data carries {count} bound state(s); lowest eigenvalue {lowest}")]
    BoundState { count: usize, lowest: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::Eigen(_)
                | Error::NonConvergence { .. }
                | Error::BlowUp { .. }
                | Error::Accuracy(_)
                | Error::Truncation { .. }
                | Error::PoleCollision { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
