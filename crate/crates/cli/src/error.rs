use std::path::PathBuf;

use multicross_core::{ConfigError, ParseError, TourError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    BadInstanceSpec(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: invalid tour: {reason}")]
    InvalidTour { path: PathBuf, reason: TourError },
    #[error("{instance}: best {best} is below the known optimum {optimum}")]
    BelowOptimum { instance: String, best: f64, optimum: f64 },
    #[error("cell ({instance}, {strategy}, seed {seed}): {source}")]
    Cell { instance: String, strategy: String, seed: u64, source: Box<CliError> },
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Parse { .. } | CliError::BadInstanceSpec(_) => 3,
            CliError::Io { .. } => 4,
            CliError::InvalidTour { .. } => 5,
            CliError::BelowOptimum { .. } => 1,
            CliError::Cell { source, .. } => source.exit_code(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
