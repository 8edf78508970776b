use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("polynomial of degree {needed} exceeds available degree {available}")]
    DegreeOverflow { needed: usize, available: usize },

    #[error("cannot condition on an event of pseudo-probability {0:e}")]
    NullEvent(f64),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
