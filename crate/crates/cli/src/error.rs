use thiserror::Error;

/// Failures that stop a command before it can report a verdict.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error(transparent)]
    Lattice(#[from] spectral_lattice::Error),
    #[error("serialising output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Every error that prevents a verdict is an input or environment problem.
    pub fn exit_code(&self) -> u8 {
        2
    }
}
