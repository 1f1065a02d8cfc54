use thiserror::Error;

/// Errors raised across the crate.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid extension degree {0}")]
    InvalidDegree(u32),
    #[error("field order {0} is too large (limit 2^31)")]
    OrderTooLarge(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("no embedded Conway polynomial for GF({p}^{e}); supply a modulus")]
    UnknownConway { p: u32, e: u32 },
    #[error("modulus is not irreducible of degree {0}")]
    ReducibleModulus(u32),
    #[error("residue class of X is not primitive for the supplied modulus")]
    NotPrimitive,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("both polynomials are zero")]
    BothZero,
    #[error("enumeration of {needed} items exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("ambient mismatch: expected dimension {expected}, found {found}")]
    AmbientMismatch { expected: usize, found: usize },
    #[error("zero vector is not a projective point")]
    ZeroVector,
    #[error("the zero form has no factorisation")]
    ZeroForm,
    #[error("matrix is singular")]
    Singular,
    #[error("point set is degenerate: spans rank {rank} < {k}")]
    Degenerate { rank: usize, k: usize },
    #[error("parameters alpha_i are not pairwise distinct")]
    AlphasNotDistinct,
    #[error("field of order {q} is too small: need at least {needed}")]
    FieldTooSmall { q: u32, needed: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no admissible solution: {0}")]
    NoSolution(String),
    #[error("matrix P is singular for i = {0}")]
    PSingular(u64),
    #[error("centres are linearly dependent")]
    DependentCenters,
    #[error("point #{0} lies in the span of the centres")]
    PointInCenterSpan(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
