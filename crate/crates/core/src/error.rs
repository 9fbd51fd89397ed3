//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid exponent {0}: must lie in [1, inf]")]
    InvalidExponent(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
