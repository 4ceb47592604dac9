//! CLI error taxonomy with a stable exit-code contract:
//! 0 success, 1 compute failure, 2 I/O, 3 validation.

use std::fmt;
use std::path::{Path, PathBuf};

use clqa_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// Filesystem or decode trouble; carries the offending path.
    Io {
        path: PathBuf,
        detail: String,
    },
    /// Structurally broken QMAT/QIMGF payload; cites the byte offset.
    Format {
        path: PathBuf,
        offset: usize,
        detail: String,
    },
    /// Bad arguments, bad config, or mismatched inputs.
    Validation(String),
    /// The numerical pipeline failed.
    Compute(String),
}

impl CliError {
    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        CliError::Io {
            path: path.to_owned(),
            detail: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Compute(_) => 1,
            CliError::Io { .. } | CliError::Format { .. } => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, detail } => write!(f, "{}: {detail}", path.display()),
            CliError::Format {
                path,
                offset,
                detail,
            } => write!(f, "{}: {detail} at byte offset {offset}", path.display()),
            CliError::Validation(msg) => write!(f, "{msg}"),
            CliError::Compute(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::DimensionMismatch { .. }
            | CoreError::RankOutOfRange { .. }
            | CoreError::InvalidConfig(_)
            | CoreError::WindowTooSmall { .. }
            | CoreError::TooSmall { .. } => CliError::Validation(e.to_string()),
            CoreError::SingularMatrix { .. }
            | CoreError::Asymmetry { .. }
            | CoreError::Convergence { .. }
            | CoreError::Pairing { .. } => CliError::Compute(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
