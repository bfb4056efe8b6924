use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("transmission out of range: T = {value} at V = {voltage}")]
    Transmission { value: f64, voltage: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation at {x} outside tabulated range [{lo}, {hi}]")]
    OutOfHull { x: f64, lo: f64, hi: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("root finding failed: {0}")]
    NoRoot(String),

    #[error("not converged: {0}")]
    NotConverged(String),

    #[error("ingestion error: {0}")]
    Ingest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
