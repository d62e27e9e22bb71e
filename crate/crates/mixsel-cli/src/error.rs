use thiserror::Error;

/// A harness failure, tagged with the process exit code it maps to.
///
/// Exit code convention: 0 success, 1 validation error (bad flags, malformed
/// or inconsistent configuration, bad input data), 2 runtime failure
/// (computation or I/O broke after validation passed).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

/// Wraps any displayable error as a validation failure (exit 1).
pub fn validation(err: impl std::fmt::Display) -> CliError {
    CliError::Validation(err.to_string())
}

/// Wraps any displayable error as a runtime failure (exit 2).
pub fn runtime(err: impl std::fmt::Display) -> CliError {
    CliError::Runtime(err.to_string())
}

pub type Result<T> = std::result::Result<T, CliError>;
