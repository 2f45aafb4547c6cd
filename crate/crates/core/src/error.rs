use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("gap of {missing} samples starting at t={start_s}s exceeds the interpolation limit")]
    GapTooLong { start_s: f64, missing: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("sentence has no in-vocabulary tokens")]
    EmptyAfterFiltering,
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("infeasible match: {segments} segments cannot cover {instructions} instructions")]
    Infeasible { segments: usize, instructions: usize },
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
