use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SktError {
    #[error("unsupported arity {0} (at most 4)")]
    UnsupportedArity(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("J is not a complex structure (|J^2 + 1| = {0:.3e})")]
    NotComplexStructure(f64),
    #[error("metric is not positive definite")]
    DegenerateMetric,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unbound parameter '{name}' at position {pos}")]
    UnboundParameter { name: String, pos: usize },
    #[error("Jacobi identity violated (residual {0:.3e})")]
    JacobiViolation(f64),
    #[error("unknown catalog entry '{0}'")]
    UnknownName(String),
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
    #[error("hypothesis failed: {what} (residual {residual:.3e})")]
    Hypothesis { what: String, residual: f64 },
    #[error("matrices do not commute (residual {0:.3e})")]
    NotCommuting(f64),
    #[error("diagonalization failed (residual {0:.3e})")]
    Defective(f64),
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, SktError>;
