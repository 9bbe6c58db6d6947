use thiserror::Error;

use crate::ring::Basis;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("basis mismatch: {0} vs {1}")]
    BasisMismatch(Basis, Basis),

    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),

    #[error("coefficient of xi^{xi} x^{x} lies outside the validity O({validity})")]
    OutsideValidity { xi: u32, x: u32, validity: u32 },

    #[error("series has a nonzero constant term")]
    NonzeroConstantTerm,

    #[error("constant term is not invertible")]
    NotInvertible,

    #[error("series is not univariate in xi")]
    NotUnivariate,

    #[error("series is exact; a finite validity is required")]
    UnboundedValidity,

    #[error("generator {generator} lies beyond the Hazewinkel horizon (m <= {horizon})")]
    HorizonExceeded { generator: usize, horizon: usize },

    #[error("expected integer coefficients, found {0}")]
    NonIntegral(String),

    #[error("expected a polynomial in the {expected} basis")]
    WrongBasis { expected: Basis },

    #[error("Euler class congruence failed: {0}")]
    EulerClass(String),

    #[error("series is not divisible: {0}")]
    NotDivisible(String),

    #[error(
        "insufficient truncation: result valid only modulo xi^{validity}, need at least {needed}"
    )]
    InsufficientTruncation { validity: u32, needed: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
