use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KzError {
    /// Parameters fall in the excluded (non-generic) set.
    #[error("excluded parameters: {0}")]
    ExcludedParameter(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, KzError>;
