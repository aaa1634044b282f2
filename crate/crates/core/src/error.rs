use std::fmt;
use std::io;

/// Errors produced by the toolkit.
#[derive(Debug)]
pub enum Error {
    /// Invalid configuration value (empty lists, non-positive scales, ...).
    Config(String),
    /// Dimension or length mismatch between inputs.
    Shape(String),
    /// Input with no usable information (all-zero stream, empty counts, ...).
    DegenerateInput(String),
    /// Argument outside the mathematical domain of an operation.
    Domain(String),
    /// Index or key out of bounds.
    Lookup(String),
    /// Tree finalized before any full-depth path formed.
    UndertrainedTree(String),
    /// Requested cluster count cannot be produced from the data.
    InfeasibleK(String),
    /// File format violation while loading a serialized artifact.
    Format(String),
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Shape(msg) => write!(f, "shape error: {msg}"),
            Error::DegenerateInput(msg) => write!(f, "degenerate input: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Lookup(msg) => write!(f, "lookup error: {msg}"),
            Error::UndertrainedTree(msg) => write!(f, "undertrained tree: {msg}"),
            Error::InfeasibleK(msg) => write!(f, "infeasible k: {msg}"),
            Error::Format(msg) => write!(f, "format error: {msg}"),
            Error::Io(err) => write!(f, "i/o error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(err: io::Error) -> Self {
        Error::Io(err)
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that indicate bad user input rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Shape(_)
                | Error::Domain(_)
                | Error::InfeasibleK(_)
                | Error::Format(_)
        )
    }
}
