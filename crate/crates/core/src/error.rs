use thiserror::Error;

/// Failure modes shared across the workbench.
///
/// `Refused` never appears here: hypothesis violations are reported as a
/// verification outcome, not an error. `Internal` marks a violated
/// mathematical guarantee and always indicates a bug.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("spec mismatch: {0}")]
    SpecMismatch(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("backend error: {0}")]
    Backend(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
