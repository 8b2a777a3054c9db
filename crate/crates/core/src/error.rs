use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("unknown letter {0}")]
    UnknownLetter(String),
    #[error("expected {expected} images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("images do not generate the free group; not an automorphism")]
    NotAutomorphism,
    #[error("matrix is not invertible over the integers")]
    NotUnimodular,
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("does not preserve the subgroup <a, b> up to conjugacy")]
    NotPreservingFactor,
    #[error("restriction to <a, b> has finite outer order; unsupported")]
    FiniteOrderRestriction,
    #[error("invalid graph map: {0}")]
    InvalidGraphMap(String),
    #[error("graph map not validated: {0}")]
    UnvalidatedInput(String),
    #[error("graph map has no exponentially growing stratum")]
    NoEgStratum,
    #[error("no normal form found within budget")]
    NormalFormNotFound,
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("budget exhausted: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
