use thiserror::Error;

/// Errors raised by the reference math, the fitter, the fixed-point layer and the divider model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation (for example `x <= 0`).
    #[error("domain error: {0}")]
    Domain(String),
    /// A value does not fit the fixed-point format it is assigned to.
    #[error("range error: {0}")]
    Range(String),
    /// Invalid configuration: unsupported degree, bad grid, inconsistent widths.
    #[error("configuration error: {0}")]
    Config(String),
    /// The operation was called with incompatible arguments.
    #[error("usage error: {0}")]
    Usage(String),
    /// The least-squares solve broke down.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// The polynomial does not have the shape a factored form needs.
    #[error("factoring error: {0}")]
    Factoring(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
