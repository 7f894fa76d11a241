use thiserror::Error;

/// Errors produced by the arithmetic, sequence, and scanning layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("argument must be positive, got 0")]
    ZeroArgument,
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("factorization requires n >= 2, got {0}")]
    FactorTooSmall(u64),
    #[error("index {base}^{exp} overflows the 128-bit index range")]
    IndexOverflow { base: u64, exp: u32 },
    #[error("index {index} exceeds the exact-evaluation limit {limit}")]
    ExactLimitExceeded { index: u128, limit: u64 },
    #[error("value overflows u64: {0}")]
    ValueOverflow(&'static str),
    #[error("sequence power must be at least 1")]
    ZeroPower,
    #[error("enumeration supports n <= {bound}, got {n}")]
    EnumerationBound { n: u64, bound: u64 },
    #[error("modular and exact evaluations disagree at n = {n}: {modular} vs {exact}")]
    CrossCheckMismatch { n: u64, modular: u64, exact: u64 },
    #[error("growth certificate is inconclusive at n = {n} and exact fallback is infeasible")]
    CertificateInconclusive { n: u64 },
    #[error("period search exhausted its candidate set for modulus {0}")]
    PeriodSearchExhausted(u64),
    #[error("period cache: {0}")]
    Cache(String),
    #[error("spec parse error at byte {position}: {message}")]
    SpecParse { position: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
