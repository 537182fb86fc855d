use thiserror::Error;

/// Errors raised by the numerical layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain of the map: {0}")]
    Domain(String),

    #[error("problem size {n} exceeds the limit {limit}")]
    SizeLimit { n: usize, limit: usize },

    #[error("near-singular pivot {pivot:e} at row {row}; move the shift")]
    NearSingular { row: usize, pivot: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { what: &'static str, iterations: usize, residual: f64 },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("evaluation point {0} lies outside the usable grid range")]
    OutOfRange(f64),

    #[error("criterion failure: {0}")]
    Criterion(String),

    #[error("at t = {t}: {source}")]
    AtTime { t: f64, source: Box<Error> },
}

impl Error {
    /// True for errors caused by bad input rather than by a numerical failure.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::InvalidParameter(_) | Error::Domain(_) | Error::SizeLimit { .. } => true,
            Error::AtTime { source, .. } => source.is_validation(),
            _ => false,
        }
    }

    pub(crate) fn at_time(self, t: f64) -> Self {
        Error::AtTime { t, source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
