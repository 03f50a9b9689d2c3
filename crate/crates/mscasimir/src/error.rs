use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("not cataloged: {0}")]
    NotCataloged(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("eigenvalue clustering ambiguous: gap {gap:e} near {value}")]
    Clustering { gap: f64, value: String },
    #[error("singular point: {0}")]
    Singular(String),
    #[error("computation failed: {0}")]
    Computation(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code: 2 for bad input, 3 for failures during computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidSignature(_)
            | Error::NotCataloged(_)
            | Error::Validation(_)
            | Error::Dimension(_)
            | Error::Singular(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::Clustering { .. } | Error::Computation(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
