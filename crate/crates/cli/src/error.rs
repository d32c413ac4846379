use std::path::PathBuf;

use camspmv::{AccelError, SparseError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: SparseError,
    },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("oracle mismatch on {matrix}, row {row}: expected {expected}, got {got}")]
    OracleMismatch {
        matrix: String,
        row: usize,
        expected: f64,
        got: f64,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl HarnessError {
    /// Process exit status: 2 parse, 3 dimension, 4 oracle mismatch, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse { .. } => 2,
            HarnessError::Dimension(_) => 3,
            HarnessError::OracleMismatch { .. } => 4,
            _ => 1,
        }
    }
}

impl From<AccelError> for HarnessError {
    fn from(e: AccelError) -> Self {
        match e {
            AccelError::DimensionMismatch(_) | AccelError::IndexWidth { .. } => {
                HarnessError::Dimension(e.to_string())
            }
            AccelError::Sparse(SparseError::DimensionMismatch(m)) => HarnessError::Dimension(m),
            AccelError::Config(c) => HarnessError::Config(c.to_string()),
            other => HarnessError::Usage(other.to_string()),
        }
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Io(std::io::Error::other(e))
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
