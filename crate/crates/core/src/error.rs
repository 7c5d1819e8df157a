use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid degree {0}")]
    InvalidDegree(usize),
    #[error("invalid precision {0}")]
    InvalidPrecision(i64),
    #[error("field too large for the coordinate representation")]
    FieldTooLarge,
    #[error("working precision exceeds the 62-bit coefficient representation")]
    PrecisionTooLarge,
    #[error("division by zero (to known precision)")]
    DivisionByZero,
    #[error("operands belong to different field contexts")]
    ContextMismatch,
    #[error("element does not lie in the requested subfield")]
    NotInSubfield,
    #[error("point at infinity is not allowed here")]
    InfinityNotAllowed,
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("insufficient jet depth: conductor {conductor} needs {needed} coefficients")]
    InsufficientJet { conductor: u8, needed: usize },
    #[error("L-function tail does not vanish: coefficient of degree {degree} has valuation {valuation} (need {needed})")]
    TailNotVanishing { degree: usize, valuation: i64, needed: i64 },
    #[error("virtual object with negative multiplicity")]
    VirtualObject,
}

pub type Result<T> = std::result::Result<T, Error>;
