use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the documented domain of an operation.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A precondition that depends on several inputs failed.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Coefficient or table range too small for the request.
    #[error("range exceeded: need index {need}, have {have}")]
    Range { need: u64, have: u64 },
    /// Hecke consistency check failed during eigenvalue extraction.
    #[error("not an eigenform at p = {p}: spread {spread:e}")]
    NotEigenform { p: u64, spread: f64 },
    /// No coefficient usable for eigenvalue extraction.
    #[error("no usable n for p = {0}")]
    NoUsableN(u64),
    /// Truncation of a numerical series could not meet its error target.
    #[error("truncation failure: {0}")]
    Truncation(String),
    /// A numerical tolerance check failed.
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    /// Cache file I/O or format problem.
    #[error("cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
