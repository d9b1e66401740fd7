use thiserror::Error;

/// Errors surfaced by state construction, tangle evaluation and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// A state or operator that violates its own invariants (zero norm,
    /// non-Hermitian matrix, trace not one, ...).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Malformed arguments: bad labels, wrong dimensions, out-of-range levels.
    #[error("invalid input: {0}")]
    Input(String),

    /// Well-formed requests that fall outside what is implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidState(msg.into()))
}
