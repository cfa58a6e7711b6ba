use thiserror::Error;

/// Errors surfaced by the lattice engine.
///
/// `Precondition` covers violated operation contracts (e.g. reflecting by a
/// vector that is not a (-2)-vector); `Internal` marks invariant violations
/// that indicate a bug rather than bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid surface data: {0}")]
    InvalidSurface(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("quadratic form is not definite: {0}")]
    IndefiniteForm(String),
    #[error("operation requires a K3 surface: {0}")]
    AbelianInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("missing oracle value for {0}")]
    MissingOracle(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code classification: 1 for user errors, 2 for internal ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Internal(_) => 2,
            _ => 1,
        }
    }
}
