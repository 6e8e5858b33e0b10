use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("field dump line {line}: {message}")]
    Dump { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Solver(#[from] nlac_core::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    /// Process exit code: 2 for bad input, 1 for failures during a run.
    pub fn exit_code(&self) -> i32 {
        use nlac_core::Error as E;
        match self {
            HarnessError::Config { .. } | HarnessError::Usage(_) | HarnessError::Dump { .. } => 2,
            HarnessError::Solver(E::InvalidParameter(_) | E::HorizonTooLarge { .. } | E::StencilWraps { .. }) => 2,
            HarnessError::Io { .. } | HarnessError::Solver(_) => 1,
        }
    }
}
