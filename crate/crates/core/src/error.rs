use thiserror::Error;

/// Failures raised by the operator calculus.
///
/// Numeric payloads are carried as `f64` regardless of the working scalar type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix data length {len} is not a square of a positive integer dimension")]
    NotSquare { len: usize },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("range error: {0}")]
    Range(String),

    #[error("singular matrix (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("gauge partition depth exhausted on subinterval [{lo}, {hi}] after {depth} bisections")]
    DepthExhausted { lo: f64, hi: f64, depth: usize },

    #[error("no convergence after {iterations} iterations; error history {history:?}")]
    NonConvergence { iterations: usize, history: Vec<f64> },

    #[error("family evaluation failed at t = {t}: {reason}")]
    Evaluation { t: f64, reason: String },

    #[error("cost guard: {requested} evaluations requested, budget is {budget}")]
    CostGuard { requested: u128, budget: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
