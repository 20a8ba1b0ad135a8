use thiserror::Error;

/// Errors returned by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(u32, u32),
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("masking order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("share count mismatch: {0} vs {1}")]
    ShareMismatch(usize, usize),
    #[error("value {value} does not fit in {width} bits")]
    Overflow { value: u64, width: u32 },
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("entropy source failure: {0}")]
    Entropy(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
