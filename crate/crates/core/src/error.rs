use thiserror::Error;

use crate::rates::RateReport;

/// Coarse classification used for CLI exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Infeasible,
    Capacity,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Input => 2,
            ErrorKind::Infeasible => 3,
            ErrorKind::Capacity => 4,
            ErrorKind::Internal => 5,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no valid {a}:{b} coloring exists: {reason}")]
    Infeasible { a: usize, b: usize, reason: String },

    #[error("heuristic search found no valid {a}:{b} coloring after {restarts} restarts")]
    NotFound { a: usize, b: usize, restarts: usize },

    #[error("{what}: {requested} exceeds the configured budget of {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("rate region incomplete: {source}")]
    Incomplete {
        partial: Box<RateReport>,
        #[source]
        source: Box<Error>,
    },

    #[error("joint coloring class is ambiguous: {0}")]
    Ambiguous(Box<crate::rates::CccWitness>),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidPmf(_)
            | Error::Config(_)
            | Error::Input(_)
            | Error::Structural(_)
            | Error::Precondition(_)
            | Error::Io(_)
            | Error::Json(_) => ErrorKind::Input,
            Error::Infeasible { .. } | Error::NotFound { .. } | Error::Ambiguous(_) => {
                ErrorKind::Infeasible
            }
            Error::Capacity { .. } => ErrorKind::Capacity,
            Error::Incomplete { source, .. } => source.kind(),
            Error::Internal(_) => ErrorKind::Internal,
        }
    }

    pub(crate) fn capacity(what: &'static str, requested: usize, limit: usize) -> Self {
        Error::Capacity {
            what,
            requested,
            limit,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
