use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] coarsekit::Error),
    #[error("{0}")]
    Usage(String),
    #[error("selftest failed")]
    SelftestFailed,
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 3 for exceeded caps, 1 for a failed selftest, 2 for every other input
    /// or validation failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(coarsekit::Error::CapExceeded { .. }) => 3,
            CliError::SelftestFailed => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
