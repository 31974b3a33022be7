use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is singular")]
    Singular,

    #[error("multiplier is zero; element is not invertible in GSp")]
    ZeroMultiplier,

    #[error("matrix is not a similitude")]
    NotSimilitude,

    #[error("multipliers differ: {0} vs {1}")]
    MultiplierMismatch(String, String),

    #[error("matrix has non-integral entries")]
    NonIntegral,

    #[error("invalid divisor type: {0}")]
    InvalidDivisorType(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("divergent region: {0}")]
    Divergent(String),

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
