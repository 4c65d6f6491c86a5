use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mean is undefined for tail index {0} (needs index > 1)")]
    MeanUndefined(f64),
    #[error("site {0} lies outside the materialized medium")]
    OutOfRange(i128),
    #[error("scaling mode does not fit the parameters: {0}")]
    ModeMismatch(String),
    #[error("domains differ: {0}")]
    DomainMismatch(String),
    #[error("inner path leaves the outer path's domain at value {0}")]
    RangeEscape(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
