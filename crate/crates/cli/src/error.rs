use std::path::PathBuf;

use chandet_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("invalid channel spec: {0}")]
    Schema(String),

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// 2 for malformed input, 3 when a numerical validation fails.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                CoreError::NotTracePreserving(_)
                | CoreError::NotCompletelyPositive(_)
                | CoreError::NotUnitary(_)
                | CoreError::NotHermitian(_)
                | CoreError::Numerical(_),
            ) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
