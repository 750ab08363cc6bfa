//! Shared error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QdpError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{value} is not invertible mod {modulus}")]
    NotInvertible { value: u64, modulus: u64 },
    #[error("q = {q} must be a positive integer coprime to ell = {ell}")]
    BadQ { q: u64, ell: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("elements come from different contexts")]
    ContextMismatch,
    #[error("truncation {trunc} too small: {reason}")]
    TruncationTooSmall { trunc: usize, reason: String },
    #[error("connection law fails: {0}")]
    NotAConnection(String),
    #[error("module is not free over the subring: {0}")]
    NotFree(String),
    #[error("budget exceeded: {need} cells needed, budget is {budget}")]
    BudgetExceeded { need: u64, budget: u64 },
    #[error("group relation mismatch: {0}")]
    RelationMismatch(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("window exceeded: {0}")]
    WindowExceeded(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("{0:?} is not a partition (parts must be weakly decreasing)")]
    NotAPartition(Vec<usize>),
    #[error("no stable polynomial interpolates the series: {0}")]
    NoStablePolynomial(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
