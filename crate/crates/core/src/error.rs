use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("column {col} out of range for a matrix with {ncols} columns")]
    ColumnOutOfRange { col: usize, ncols: usize },

    #[error("{0} is not a prime greater than 2^20")]
    InvalidPrime(u64),

    #[error("an entry has a denominator divisible by {0}")]
    DenominatorDivisible(u64),

    #[error("size mismatch: |lambda| = {lambda}, |mu| = {mu}")]
    SizeMismatch { lambda: usize, mu: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("leaf {0} carries an abstract index, not a vector")]
    UnlabeledLeaf(usize),

    #[error("element is not in D: {0}")]
    NotInD(String),

    #[error("unknown {kind} {name:?}; known: {known}")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
