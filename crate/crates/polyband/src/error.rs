use std::path::PathBuf;

/// Failure of a CLI run, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("numerical failure: {0}")]
    Numerical(#[from] polyband_core::Error),

    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("output encoding: {0}")]
    Encoding(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config { .. } => 2,
            RunError::Numerical(_) | RunError::Io { .. } | RunError::Encoding(_) => 3,
        }
    }

    pub fn config(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        RunError::Config { path: path.into(), message: message.into() }
    }
}

pub type RunResult<T> = Result<T, RunError>;
