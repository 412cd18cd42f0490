use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unknown or missing config keys: exit code 2.
    #[error("usage error: {0}")]
    Usage(String),

    /// The numerical library rejected the inputs: exit code 1.
    #[error("error: {0}")]
    Domain(#[from] sphercool::Error),

    #[error("error: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io { .. } => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            other => other.to_string(),
        }
    }
}
