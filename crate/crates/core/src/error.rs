use thiserror::Error;

pub type Result<T, E = XglError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum XglError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("rejection sampling gave up after {attempts} attempts; exclusion radius {radius} leaves too little free space")]
    RejectionLimit { attempts: usize, radius: f64 },

    #[error("class {label} has {available} members, need at least {required}")]
    InsufficientClass {
        label: String,
        available: usize,
        required: usize,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("SMO did not converge within {iterations} iterations (violation {violation:e})")]
    NonConvergence { iterations: usize, violation: f64 },

    #[error("cannot extract {k} clusters from {n} points")]
    TooManyClusters { k: usize, n: usize },

    #[error("explanation was built for model version {explanation} but model is at version {model}")]
    StaleExplanation { explanation: u64, model: u64 },

    #[error("dataset carries no generator metadata")]
    MissingMetadata,

    #[error("index {0} is out of range")]
    IndexOutOfRange(usize),

    #[error("index {0} is already labeled")]
    AlreadyLabeled(usize),

    #[error("point ({x1}, {x2}) lies outside the unit square")]
    PointOutOfRange { x1: f64, x2: f64 },

    #[error("version conflict: client saw {client}, session is at {current}")]
    VersionConflict { client: u64, current: u64 },

    #[error("session is not initialized")]
    Uninitialized,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
