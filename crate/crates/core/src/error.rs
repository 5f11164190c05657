use thiserror::Error;

/// Errors produced across the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: String },

    #[error("{dim} is not a perfect square")]
    NotPerfectSquare { dim: usize },

    #[error("not a permutation: {0:?}")]
    NotPermutation(Vec<usize>),

    #[error("matrix is not monomial: column {column} {reason}")]
    NotMonomial { column: usize, reason: String },

    #[error("phase {turns} turns (column {column}) is not a rational turn with denominator <= {max_denom}")]
    PhaseNotRecognized { column: usize, turns: f64, max_denom: i64 },

    #[error("order exceeds cap {cap}")]
    OrderOverflow { cap: u64 },

    #[error("operator is not a tensor product of monomial factors")]
    NotLocal,

    #[error("input vector is not unit norm (norm {norm})")]
    NotUnitNorm { norm: f64 },

    #[error("matrix is not {0} (residual {1:e})")]
    Residual(&'static str, f64),

    #[error("{0}")]
    Enumeration(String),

    #[error("no intertwiner: {0}")]
    NoIntertwiner(String),

    #[error("not projectively of order three (residual {0:e})")]
    NotOrderThree(f64),

    #[error("monomial matrix does not satisfy U^3 = 1 exactly")]
    NotExactOrderThree,

    #[error("eigenvalue not near a cube root of unity: {0}")]
    EigenvalueNotCubeRoot(String),

    #[error("closure exceeded budget of {budget} elements")]
    BudgetExceeded { budget: usize },

    #[error("invariant subspace has dimension {found}, expected {expected}")]
    SubspaceDimension { expected: usize, found: usize },

    #[error("multiplet invariance violated: intra-coset spread {0:e}")]
    MultipletInvariance(f64),

    #[error("theta series tail bound {bound:e} exceeds {limit:e}; raise the truncation")]
    TailBound { bound: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed fiducial file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
