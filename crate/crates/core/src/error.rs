use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("points are linearly dependent (rank {rank}, need {needed})")]
    LinearlyDependent { rank: usize, needed: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("expected {expected} local orders, got {found}")]
    WrongPartyCount { expected: usize, found: usize },

    #[error("invalid local order: {0}")]
    InvalidOrder(String),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("invalid sign function: {0}")]
    InvalidSignFunction(String),

    #[error("sign function is not admissible (forbidden same-party monomial in its spectrum)")]
    NotAdmissible,

    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),

    #[error("inequality is not valid: classical bound {classical} differs from stated bound {bound}")]
    Validity { bound: String, classical: String },

    #[error("two-setting reduction impossible: {0}")]
    Reduction(String),

    #[error("correlation value out of range [-1, 1] at slot {slot}: {value}")]
    OutOfRange { slot: usize, value: String },

    #[error("empty or mismatched inequality catalog: {0}")]
    Catalog(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
