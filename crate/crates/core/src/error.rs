use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed Y4M header: {0}")]
    Parse(String),

    #[error("truncated input: {0}")]
    Truncated(String),

    #[error("unsupported format: {0}")]
    Unsupported(String),

    #[error("sequences are not aligned: {0}")]
    Alignment(String),

    #[error("input too small: {0}")]
    InputTooSmall(String),

    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("bad training data at row {row}: {reason}")]
    Data { row: usize, reason: String },

    #[error("model file: {path}: {reason}")]
    ModelSchema { path: String, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("CSV schema: {0}")]
    Schema(String),

    #[error("{stage} failed for {}: {source}", path.display())]
    Stage {
        stage: &'static str,
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_stage(self, stage: &'static str, path: impl Into<PathBuf>) -> Self {
        Error::Stage {
            stage,
            path: path.into(),
            source: Box::new(self),
        }
    }
}
