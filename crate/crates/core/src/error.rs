use thiserror::Error;

/// Errors surfaced by constructors and fallible operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ring tag mismatch: {0:?} vs {1:?}")]
    RingMismatch(crate::algebra::Ring, crate::algebra::Ring),
    #[error("division by zero in Euclidean division")]
    DivisionByZero,
    #[error("{0} is not a rational prime")]
    NotPrime(u64),
    #[error("moduli are not relatively prime: gcd has norm {0}")]
    NotCoprime(u64),
    #[error("field modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("polynomial x^2+{c1}x+{c0} is reducible over F_{q}")]
    ReduciblePoly { q: u64, c1: u64, c0: u64 },
    #[error("no root of the level polynomial found in the residue ring")]
    NoPolyRoot,
    #[error("generators do not induce a bijection onto the constellation")]
    NotBijective,
    #[error("labeling kind {0} not valid here: {1}")]
    WrongLabelingKind(String, String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generator matrix is rank deficient over F_{0}")]
    RankDeficient(u64),
    #[error("enumeration budget exceeded: {size} > {budget}")]
    BudgetExceeded { size: u128, budget: u128 },
    #[error("invalid function coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
