use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("unsupported modulus {0}: must be a prime below 65536")]
    BadModulus(u32),

    #[error("series is zero to precision {prec}; cannot invert")]
    NotInvertible { prec: i32 },

    #[error("insufficient precision: need exponent {needed}, known below {prec}")]
    InsufficientPrecision { needed: i32, prec: i32 },

    #[error("no cyclic vector found")]
    NoCyclicVectorFound,

    #[error("first basis vector is not cyclic for the 2x2 block")]
    NotCyclic,

    #[error("determinant valuation is {0}, expected 0")]
    DeterminantValuation(i32),

    #[error("invalid slope sequence: {0}")]
    InvalidSlopes(String),

    #[error("matrix does not have the requested block shape")]
    ShapeMismatch,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid affine Weyl element: {0}")]
    InvalidElement(String),

    #[error("coset pattern undefined for {0}")]
    PatternUndefined(String),

    #[error("no stratum predicate covers {0}")]
    CaseNotApplicable(String),

    #[error("slope sequence {0} is not in the poset")]
    ElementsNotInPoset(String),

    #[error("exceptional corollary branch is not defined at the generic slope")]
    ExceptionBranchAtGeneric,

    #[error("no witness formula for {0}")]
    NoWitnessFormula(String),

    #[error("zero count at p = {0}; increase trials")]
    ZeroCount(u32),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
