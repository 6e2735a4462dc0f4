//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("expansion has a non-integer coefficient at exponent {exponent}")]
    NonIntegerExpansion { exponent: i64 },
    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
    #[error("invalid Satake datum: {0}")]
    InvalidDatum(String),
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("Q table is not hermitian for the pair ({i}, {j})")]
    NonHermitian { i: String, j: String },
    #[error("orientation inconsistent with the Cartan matrix: {0}")]
    Orientation(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
