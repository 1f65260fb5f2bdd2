use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("attribute {attribute}: value kind does not match restriction target kind")]
    KindMismatch { attribute: usize },

    #[error("restriction attribute index {index} out of range for relation of arity {arity}")]
    AttributeOutOfRange { index: usize, arity: usize },

    #[error("object {object_id} has {actual} attributes, relation declares {expected}")]
    ArityMismatch {
        object_id: u64,
        expected: usize,
        actual: usize,
    },

    #[error("query has no restriction with positive weight")]
    AllWeightsZero,

    #[error("query targets relation `{query}` but store holds relation `{store}`")]
    RelationMismatch { query: String, store: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("unknown categorical token `{token}` for attribute `{attribute}`")]
    UnknownToken { attribute: String, token: String },

    #[error("duplicate object id {0}")]
    DuplicateObjectId(u64),

    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),

    #[error("ratio denominator is zero (degenerate enhanced run)")]
    ZeroRatioDenominator,

    #[error("cell (k={k}, restrictions={restrictions}, policy={policy}) differs from the brute-force oracle")]
    OracleMismatch {
        k: usize,
        restrictions: usize,
        policy: String,
    },

    #[error("benchmark cell (k={k}, restrictions={restrictions}, policy={policy}) failed: {message}")]
    Cell {
        k: usize,
        restrictions: usize,
        policy: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
