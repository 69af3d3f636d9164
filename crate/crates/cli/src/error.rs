use std::fmt;

use dfsim::dynamics::EvolveError;

/// Invalid configuration, arguments or grid.
pub const EXIT_CONFIG: u8 = 2;
/// Integration failure or an emitted file that fails self-validation.
pub const EXIT_NUMERICS: u8 = 3;
/// I/O and other unexpected failures.
pub const EXIT_OTHER: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn numerics(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICS,
            message: message.into(),
        }
    }

    pub fn other(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_OTHER,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<dfsim::Error> for CliError {
    fn from(e: dfsim::Error) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<EvolveError<f64>> for CliError {
    fn from(e: EvolveError<f64>) -> Self {
        match e {
            EvolveError::Model(inner) => inner.into(),
            other => CliError::numerics(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::other(format!("I/O error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::other(format!("CSV error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::other(format!("JSON error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
