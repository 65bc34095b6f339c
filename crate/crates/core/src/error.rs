use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A potential profile violates its parameter invariants.
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    /// The fiber operator has no eigenvalues (inverted parabola at least as strong as the field).
    #[error("fiber operator is unbounded below or has no point spectrum: {0}")]
    UnboundedBelow(String),

    /// The potential has no analytic derivative; use finite differences in p instead.
    #[error("potential derivative unavailable")]
    DerivativeUnavailable,

    #[error("matrix size {size} exceeds limit {limit}")]
    SizeExceeded { size: usize, limit: usize },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("at p = {p}: {source}")]
    AtMomentum { p: f64, source: Box<Error> },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn at_momentum(self, p: f64) -> Error {
        Error::AtMomentum {
            p,
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
