use thiserror::Error;

/// Errors raised by the exact core, the solvers and the numeric oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HizError {
    #[error("spectral point is degenerate: {0}")]
    CoincidentEigenvalues(String),

    #[error("vertex count mismatch: {left} vs {right}")]
    MismatchedK { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported vertex count k={k} (supported {min}..={max})")]
    UnsupportedK { k: usize, min: usize, max: usize },

    #[error("rule {rule} is not defined for k={k}")]
    UndefinedRule { rule: String, k: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("linear system is inconsistent at degree {degree}")]
    InconsistentSystem { degree: u32 },

    #[error("collocation did not converge: {0}")]
    Collocation(String),

    #[error("not enough samples: {0}")]
    InsufficientSamples(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, HizError>;
