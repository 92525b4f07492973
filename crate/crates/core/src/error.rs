use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid carpet spec: {0}")]
    InvalidSpec(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbVector(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("x = {x} outside the rate function domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("carpet has uniform vertical fibres; the interval (0, log(N/M) - mean log N) is empty")]
    UniformFibres,

    #[error("theta = {theta} outside [{lo}, {hi}]")]
    ThetaOutOfRange { theta: f64, lo: f64, hi: f64 },

    #[error("mixing weight u = {0} outside [0, 1]")]
    UOutOfRange(f64),

    #[error("three-scale search found no strict improvement at theta = {0}")]
    SearchFailed(f64),

    #[error("window of length {got} does not match the {expected} positions consumed by the count formula")]
    RegimeMismatch { expected: usize, got: usize },

    #[error("regime error: {0}")]
    Regime(String),

    #[error("word of length {len} is shorter than the measure level K = {level}")]
    WordTooShort { len: usize, level: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed spec file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
