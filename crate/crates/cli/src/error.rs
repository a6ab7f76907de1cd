use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config schema error: {0}")]
    Schema(String),

    #[error("computation failed: {0}")]
    Compute(#[from] cpdq_core::Error),

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Parse(_) | CliError::Schema(_) => EXIT_CONFIG,
            CliError::Compute(_) | CliError::Write { .. } => EXIT_COMPUTE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
