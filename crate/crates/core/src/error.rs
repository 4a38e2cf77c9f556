use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("operands live in different rings")]
    RingMismatch,
    #[error("no value assigned to coefficient variable `{0}`")]
    UnassignedVariable(String),
    #[error("operation requires a truncated Artin coefficient algebra")]
    NotArtin,
    #[error("colength did not stabilize up to truncation {cap}")]
    InfiniteColength { cap: u32 },
    #[error("the ideal is the unit ideal; its variety is empty")]
    EmptyVariety,
    #[error("{needed} variables exceed the cap of {cap}")]
    VariableCap { needed: usize, cap: usize },
    #[error("element is a unit")]
    Unit,
    #[error("element is zero")]
    Zero,
    #[error("truncation {0} is too small")]
    TruncationTooSmall(u32),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("elimination stalled on {0:?}")]
    EliminationStall(Vec<String>),
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("sampling failed: {0}")]
    SamplingFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
