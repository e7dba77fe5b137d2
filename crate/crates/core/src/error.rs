use thiserror::Error;

/// Errors produced anywhere in the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alist line {line}: {msg}")]
    Alist { line: usize, msg: String },

    #[error("invalid parity-check matrix: {0}")]
    InvalidMatrix(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite LLR at index {0}")]
    NonFiniteLlr(usize),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("message length {k} too large for exhaustive ML decoding (limit {limit})")]
    TooManyCodewords { k: usize, limit: usize },

    #[error("unknown decoder '{0}'")]
    UnknownDecoder(String),

    #[error("I/O error on {path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
