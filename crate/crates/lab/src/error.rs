use std::io;
use std::path::PathBuf;

/// Failures surfaced by the harness, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical certification failed: {0}")]
    Numerical(#[from] repwalk_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::Numerical(_) => 3,
            LabError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> LabError {
        let path = path.into();
        move |source| LabError::Io { path, source }
    }
}

pub type LabResult<T> = Result<T, LabError>;
