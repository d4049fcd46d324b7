use std::path::PathBuf;

use thiserror::Error;

/// Harness errors. Each maps to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error("resource cap: {0}")]
    Resource(String),
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(xebspoof::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Tolerance(_) => 3,
            CliError::Resource(_) => 4,
            CliError::Io { .. } | CliError::Core(_) => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<xebspoof::Error> for CliError {
    fn from(e: xebspoof::Error) -> Self {
        use xebspoof::Error as E;
        match e {
            E::SizeLimit { .. } | E::PhotonCap { .. } | E::EnumerationCap { .. } => CliError::Resource(e.to_string()),
            E::Parse(_) | E::FamilyMismatch { .. } => CliError::Config(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
