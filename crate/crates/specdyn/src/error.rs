use thiserror::Error;

/// Errors produced by the numerical operations in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("numerical failure: {context} (achieved error {achieved:e}, wanted {wanted:e})")]
    Numerical {
        context: &'static str,
        achieved: f64,
        wanted: f64,
    },

    #[error("degenerate scaling window: only {surviving} points survive windowing (need >= {needed})")]
    DegenerateWindow { surviving: usize, needed: usize },

    #[error("vector is not normalized: |norm - 1| = {deviation:e}")]
    NotNormalized { deviation: f64 },

    #[error("eigensolver failed to converge at index {index}: residual {residual:e}")]
    ConvergenceFailure { index: usize, residual: f64 },

    #[error("target window at level {level} contains no input point (input not dense at scale {width:e})")]
    WindowEmpty { level: usize, width: f64 },

    #[error("tail coefficients not 2q-summable: s*q = {product} must exceed 1")]
    SummabilityViolated { product: f64 },

    #[error("spacing witness too shallow: depth {depth}, need {needed}")]
    WitnessTooShallow { depth: usize, needed: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid construction: {0}")]
    InvalidConstruction(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("missing stage output: {0}")]
    MissingStage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
