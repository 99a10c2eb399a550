use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("kernel tail is not integrable: {0}")]
    Divergence(String),

    #[error("cannot sample from a zero kernel")]
    Sampling,

    #[error("requested size p = {p} exceeds the limit {limit}")]
    Resource { p: usize, limit: usize },

    #[error("structure error: {0}")]
    Structure(String),

    #[error("estimate unreliable: {0}")]
    EstimateUnreliable(String),

    #[error("|alpha|*K = {0} >= 1, no remainder certificate")]
    OutsideCertificate(f64),

    #[error("JSON error: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
