//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: function expects {expected} bits, got {got}")]
    ArityMismatch { expected: u32, got: u32 },

    #[error("{0} is out of the supported range: {1}")]
    OutOfRange(&'static str, String),

    #[error("operation requires a monotone function")]
    NotMonotone,

    #[error("empty cell at row {row}, col {col}: restriction is not a valid game instance")]
    EmptyCell { row: usize, col: usize },

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("memory budget exceeded: {0}")]
    MemoryBudget(String),

    #[error("invalid constraint specification: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
