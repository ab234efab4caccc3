use thiserror::Error;

/// Errors raised by the geometry, quadrature and valuation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported dimension {0}: only n = 3 and n = 4 are supported")]
    UnsupportedDimension(usize),
    #[error("degenerate body: {0}")]
    DegenerateBody(String),
    #[error("numerical conditioning: {0}")]
    Conditioning(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
