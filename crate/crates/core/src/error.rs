use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants are grouped so that front-ends can map them onto exit codes:
/// validation-like failures, numeric failures and IO failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("out of range: {0}")]
    Range(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("size limit: {0}")]
    Size(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("fold construction failed: {0}")]
    Fold(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse error classes, used for exit-code mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numeric,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Numeric(_) | Error::UndefinedCorrelation(_) => ErrorClass::Numeric,
            Error::Io(_) => ErrorClass::Io,
            _ => ErrorClass::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
