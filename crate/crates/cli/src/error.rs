use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: line {line}, column {column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("distance table has no entry for pair ({0}, {1})")]
    MissingPair(String, String),
    #[error("distance pair ({0}, {1}) is listed more than once")]
    DuplicatePair(String, String),
    #[error("unknown unit id `{0}` in distance table")]
    UnknownId(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Core {
        context: &'static str,
        source: spatreg_core::Error,
    },
}

impl CliError {
    pub fn core(context: &'static str) -> impl FnOnce(spatreg_core::Error) -> CliError {
        move |source| CliError::Core { context, source }
    }

    /// 1 for input problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core { source, .. } if source.is_numerical() => 2,
            _ => 1,
        }
    }
}
