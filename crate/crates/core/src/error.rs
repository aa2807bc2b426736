use thiserror::Error;

/// Errors raised by the numerical kernels, solvers and harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {actual}")]
    Dimension { op: &'static str, expected: String, actual: String },

    #[error("non-finite value at index {index} while constructing {what}")]
    NonFinite { what: &'static str, index: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("numerical failure in {op} on a {rows}x{cols} matrix: {reason}")]
    Numerical { op: &'static str, rows: usize, cols: usize, reason: String },
}

impl Error {
    pub(crate) fn dimension(op: &'static str, expected: impl ToString, actual: impl ToString) -> Self {
        Error::Dimension { op, expected: expected.to_string(), actual: actual.to_string() }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(op: &'static str, rows: usize, cols: usize, reason: impl Into<String>) -> Self {
        Error::Numerical { op, rows, cols, reason: reason.into() }
    }

    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
