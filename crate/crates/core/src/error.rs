use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot embed conductor {from} into conductor {to}")]
    InvalidEmbedding { from: u64, to: u64 },
    #[error("{u} is not a unit modulo {m}")]
    NotUnit { u: i64, m: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("conductor {0} is not supported")]
    UnsupportedConductor(u64),
    #[error("precision of {0} bits is not supported (maximum 100)")]
    PrecisionUnsupported(u32),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} must be odd")]
    EvenModulus(u64),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("factors are not pairwise coprime")]
    NonCoprimeFactors,
    #[error("{0} is not square-free")]
    NotSquarefree(u64),
    #[error("eta value must be nonzero")]
    ZeroEta,
    #[error("arithmetic overflow")]
    Overflow,
    #[error("value exceeds the supported range: {0}")]
    OutOfRange(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
