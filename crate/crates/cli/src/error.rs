use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: invalid JSON: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] lindyn::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    /// Input and usage problems exit with 2; certificates that could not be
    /// settled exit with 4.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(lindyn::Error::Undecided(_) | lindyn::Error::TailNotCertified(_)) => 4,
            _ => 2,
        }
    }
}
