use thiserror::Error;

/// Errors raised by the certified path-tracking library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A precision increase was demanded but the active backend cannot provide it.
    #[error("working precision exhausted ({0})")]
    PrecisionExhausted(&'static str),

    #[error("refinement did not terminate within {0} iterations")]
    StepBudgetExceeded(u64),

    #[error("numerically singular Jacobian")]
    SingularJacobian,

    #[error("no radius in the search range certifies the candidate")]
    CandidateRejected,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown variable `{name}` at line {line}, column {column}")]
    UnknownVariable {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("system has dimension 0")]
    EmptySystem,

    #[error("circuit has no parameter input")]
    NotParametric,

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
