use thiserror::Error;

/// Errors raised by model construction and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} out of range for {len} sites")]
    Index { index: usize, len: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected}x{expected}, found {found_rows}x{found_cols}")]
    Shape {
        expected: usize,
        found_rows: usize,
        found_cols: usize,
    },

    #[error("degenerate limit: {0}")]
    DegenerateLimit(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid projection: |rho12|^2 = {coherence_sq} exceeds rho22 (1 - rho22) = {bound}")]
    InvalidProjection { coherence_sq: f64, bound: f64 },

    #[error("parameter undefined: {0}")]
    Undefined(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
