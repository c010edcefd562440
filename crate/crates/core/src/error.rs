use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index ({row}, {col}) out of range for {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("format violation: {0}")]
    FormatViolation(String),

    #[error("degenerate simplex {index}: signed area {area:e}")]
    DegenerateSimplex { index: usize, area: f64 },

    #[error("vertex numbering violation: {0}")]
    Numbering(String),

    #[error("zero diagonal at index {0}")]
    SingularSmoother(usize),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("quadratic form is negative: {0:e}")]
    SpdViolation(f64),

    #[error("preconditioner is not positive definite: <Br, r> = {0:e}")]
    IndefinitePreconditioner(f64),

    #[error("iteration diverged at step {iteration}: error {error:e} vs initial {initial:e}")]
    Divergence {
        iteration: usize,
        error: f64,
        initial: f64,
    },

    #[error("hierarchy state: {0}")]
    State(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {msg}")]
    Io { path: String, msg: String },

    #[error("{method} at level {level}: {source}")]
    Experiment {
        method: String,
        level: usize,
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
