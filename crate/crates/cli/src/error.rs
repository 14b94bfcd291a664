use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{0}")]
    Core(#[from] dstrans_core::Error),
    /// Unpivoted Cholesky of `B` failed, so the reference method cannot run.
    #[error("B not positive definite, standard method inapplicable ({0})")]
    StandardInapplicable(dstrans_core::Error),
    #[error("B0 is zero")]
    ZeroMassMatrix,
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 for a tripped `eta ||X||` guard, 3 when the reference method's
    /// Cholesky fails, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(dstrans_core::Error::EtaXGuard { .. }) => 2,
            CliError::StandardInapplicable(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
