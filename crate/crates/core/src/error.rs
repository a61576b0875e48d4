use thiserror::Error;

/// Errors raised by the geometry routines and the experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A derived structure could not be built (e.g. a cone cover failed certification).
    #[error("construction error: {0}")]
    Construction(String),

    /// The input does not span the required number of dimensions.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An oracle comparison failed.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
