use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("modulus {0:?} is reducible over the prime field")]
    Reducible(Vec<u64>),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("size {0} exceeds the configured limit")]
    TooLarge(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("constant polynomial")]
    ConstantPolynomial,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("premise violated: {0}")]
    PremiseViolation(String),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("b = 0 makes the equation diagonal")]
    DegenerateB,
    #[error("m = {m} is outside 1..={max}")]
    MOutOfRange { m: u64, max: u64 },
    #[error("expansion exceeded {0} terms")]
    TermCap(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// True for failures of a mathematical hypothesis or premise (as opposed
    /// to malformed input or resource limits).
    pub fn is_hypothesis(&self) -> bool {
        matches!(
            self,
            Error::HypothesisViolation(_) | Error::PremiseViolation(_) | Error::MOutOfRange { .. }
        )
    }
}
