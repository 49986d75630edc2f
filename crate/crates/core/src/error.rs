use thiserror::Error;

use crate::expr::ParseError;
use crate::jets::DomainError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] DomainError),

    #[error("metric is not invertible at the evaluation point")]
    SingularMetric,

    #[error("parametrization has rank below {expected} at the evaluation point")]
    RankDeficient { expected: usize },

    #[error("almost contact identity violated: {0}")]
    AlgebraViolation(String),

    #[error("sampling exhausted: accepted {accepted} of {requested} points after {draws} draws")]
    SamplingExhausted {
        requested: usize,
        accepted: usize,
        draws: usize,
    },

    #[error("{0}")]
    Usage(String),

    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: ParseError,
    },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors that only concern one sampled point; the point is skipped.
    pub fn is_pointwise(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::SingularMetric | Error::RankDeficient { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
