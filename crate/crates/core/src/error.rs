use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field order {0} is not a prime in [2, 251]")]
    InvalidField(u32),

    #[error("operands belong to different fields (GF({left}) vs GF({right}))")]
    FieldMismatch { left: u8, right: u8 },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("value {value} is not a canonical element of GF({p})")]
    InvalidElement { value: u32, p: u8 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("generator is not systematic: {0}")]
    NotSystematic(String),

    #[error("code must have at least one message symbol")]
    EmptyCode,

    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("recovery identity fails on generator row {row}")]
    RecoveryFails { row: usize },

    #[error("invalid recovery input: {0}")]
    InvalidRecovery(String),

    #[error("coordinate {index} is not in the support of the dual codeword")]
    NotInSupport { index: usize },

    #[error("{what}: {needed} exceeds the configured cap of {cap}; {advice}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
        advice: &'static str,
    },

    #[error("code is not {k}-batch for request {request:?}")]
    NotBatch { k: usize, request: Vec<usize> },

    #[error("t = 0: theorem machinery vacuous for k = {0}")]
    VacuousTheorem(usize),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
