use thiserror::Error;

/// Errors raised by the witnesslab library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid modulus {0}: must be at least {1}")]
    InvalidModulus(u64, u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("argument {value} out of range [0, {modulus})")]
    OutOfRange { value: u64, modulus: u64 },

    #[error("{0} does not divide {1}")]
    NotDivisor(u64, u64),

    #[error("construction not applicable: {0}")]
    Inapplicable(String),

    #[error("linear program failed: {0}")]
    Solver(String),

    #[error("witness verification failed for q = {q}: {reason}")]
    Verification { q: u64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
