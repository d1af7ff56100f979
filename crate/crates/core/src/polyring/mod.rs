//! Exact sparse multivariate polynomials over the rationals.

mod modular;
mod monomial;
mod poly;
mod rational;
pub mod serial;
mod univariate;

pub use modular::{
    add_mod, distinct_primes, is_prime_u64, mul_mod, pow_mod, reduce_mod, sub_mod, ModPoly,
    PrimeContext, DEFAULT_PRIME_BITS,
    DEGREE_MARGIN_BITS,
};
pub use monomial::{ExponentVector, Ring, MAX_VARS};
pub use poly::Polynomial;
pub use rational::{ParseRationalError, Rational};
pub use univariate::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("ring mismatch: [{left}] vs [{right}]")]
    RingMismatch { left: String, right: String },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("variable {0:?} is not bound")]
    UnboundVariable(String),
    #[error("duplicate variable {0:?}")]
    DuplicateVariable(String),
    #[error("invalid variable name {0:?}")]
    InvalidVariableName(String),
    #[error("{0} variables exceed the supported maximum of {MAX_VARS}")]
    TooManyVariables(usize),
    #[error("expected {expected} exponents, got {got}")]
    ExponentLength { expected: usize, got: usize },
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("denominator not invertible modulo {0}")]
    NonInvertibleDenominator(u64),
    #[error("prime width {0} outside 2..=63 bits")]
    PrimeBits(u32),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {modulus} is too small for degree {degree}")]
    PrimeTooSmall { modulus: u64, degree: u32 },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// The coordinate ring `Q[x0, ..., x4]` names, in order.
pub const X_VARS: [&str; 5] = ["x0", "x1", "x2", "x3", "x4"];

#[cfg(test)]
mod tests;
