//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by tests, distributions and the simulation harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An input value is outside the mathematical domain of the operation
    /// (non-finite argument, probability outside (0,1), negative radius, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration is internally inconsistent (degenerate split sizes,
    /// invalid significance level, empty grids, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Two inputs that must agree in shape do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The scale estimate tau_hat^2 + sigma2_hat vanished; the TAB statistic
    /// is undefined for constant target sequences.
    #[error("degenerate scale: {0}")]
    DegenerateScale(String),

    /// A covariance matrix could not be factorized (not positive semi-definite).
    #[error("factorization error: {0}")]
    Factorization(String),

    /// A CSV cell or row could not be parsed. `column` is zero when the whole
    /// row (rather than one cell) is malformed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
