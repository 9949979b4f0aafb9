use std::fmt;

use twostage_core::Error as CoreError;

/// Failure classes of the command line, each with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum AppError {
    /// Invalid instance, contract or parameters (exit 1).
    Invalid(String),
    /// An enumeration cap was exceeded (exit 2).
    Cap(String),
    /// Unreadable input or malformed document (exit 3).
    Io(String),
    Parse(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Invalid(_) => 1,
            AppError::Cap(_) => 2,
            AppError::Io(_) | AppError::Parse(_) => 3,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Invalid(m) => write!(f, "invalid input: {m}"),
            AppError::Cap(m) => write!(f, "enumeration cap exceeded: {m}"),
            AppError::Io(m) => write!(f, "i/o error: {m}"),
            AppError::Parse(m) => write!(f, "parse error: {m}"),
        }
    }
}

impl std::error::Error for AppError {}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::CapExceeded { .. } => AppError::Cap(e.to_string()),
            CoreError::ParseNumber(_) => AppError::Parse(e.to_string()),
            _ => AppError::Invalid(e.to_string()),
        }
    }
}
