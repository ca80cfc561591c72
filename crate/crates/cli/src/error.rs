use std::path::PathBuf;

use cfcomm_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Scenario { path: String, source: CoreError },

    #[error("unknown builtin scenario {0:?}")]
    UnknownBuiltin(String),

    #[error("cannot encode report: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 input, 3 numerical or runtime, 4 size.
    pub fn exit_code(&self) -> u8 {
        let core = match self {
            CliError::Core(e) | CliError::Scenario { source: e, .. } => e,
            CliError::Json(_) => return 3,
            _ => return 2,
        };
        match core {
            CoreError::NumericalIntegrity(_)
            | CoreError::InfeasibleProtocol(_)
            | CoreError::ChannelInfeasible { .. } => 3,
            CoreError::Size(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
