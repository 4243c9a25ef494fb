use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipeError {
    #[error("malformed cluster at {path}: {detail}")]
    MalformedCluster { path: PathBuf, detail: String },

    #[error("cluster at {path} has no documents")]
    EmptyCluster { path: PathBuf },

    #[error("cluster `{id}` has no reference summaries")]
    MissingReferences { id: String },

    #[error("feature configuration has no fitted bin edges")]
    UnfittedConfig,

    #[error("n-gram order {n} unsupported; expected 1 or 2")]
    InvalidNgramOrder { n: usize },

    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("no training clusters provided")]
    EmptyTrainingSet,

    #[error(transparent)]
    Dpp(#[from] dpp::DppError),

    #[error("model file error: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PipeError>;
