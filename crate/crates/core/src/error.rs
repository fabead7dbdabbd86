use thiserror::Error;

/// Errors produced by parsing, evaluation and the geometric checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {position}: expected one of {expected:?}")]
    Syntax { position: usize, expected: Vec<String> },

    #[error("variable u{index} is outside the chart of dimension {dim}")]
    IndexOutOfChart { index: usize, dim: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate metric (det = {det:e})")]
    DegenerateMetric { det: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("only {survivors} admissible grid points survived rejection (need at least {required})")]
    GridExhausted { survivors: usize, required: usize },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("lambda sample ({lambda1}, {lambda2}) is degenerate at every grid point")]
    DegenerateSample { lambda1: f64, lambda2: f64 },

    #[error("specification violated: {0}")]
    SpecViolation(String),

    #[error("dimension {0} is outside the supported range 1..=8")]
    UnsupportedDimension(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
