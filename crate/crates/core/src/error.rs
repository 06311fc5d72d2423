use thiserror::Error;

/// Errors raised by the lattice laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension d={0}: only d=2 and d=4 are supported")]
    UnsupportedDimension(usize),

    #[error("lattice needs at least 2 sites per dimension, got n={0}")]
    TooFewSites(usize),

    #[error("lattice spacing must be positive and finite, got l={0}")]
    InvalidSpacing(f64),

    #[error("vertex {0:?} is not a vertex of this lattice")]
    InvalidVertex(Vec<usize>),

    #[error("path is not composable at step {0}")]
    NonComposablePath(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("spectrum multiplicities sum to {found}, expected N={expected}")]
    SpectrumMismatch { expected: usize, found: usize },

    #[error("configuration violates the representation constraint (residual {residual:e} > {tolerance:e})")]
    ConstraintViolated { residual: f64, tolerance: f64 },

    #[error("operator dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("field period {period} does not match the lattice size n*l = {size}")]
    PeriodMismatch { period: f64, size: f64 },

    #[error("curvature needs two distinct directions, got mu=nu={0}")]
    SameDirection(usize),

    #[error("quadrature grid {quad_n} too small for exactness, need at least {required}")]
    QuadratureTooCoarse { quad_n: usize, required: usize },

    #[error("convergence fit needs at least 3 usable points, got {0}")]
    TooFewPoints(usize),

    #[error("sweep sizes must be strictly ascending")]
    UnsortedSweep,

    #[error("least-squares system is singular")]
    Singular,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
