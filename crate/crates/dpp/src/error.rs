use thiserror::Error;

/// Errors produced by kernel construction, inference, and learning.
#[derive(Debug, Error)]
pub enum DppError {
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {dev:e} exceeds 1e-9")]
    NotSymmetric { i: usize, j: usize, dev: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {min:e} below -1e-9")]
    NotPsd { min: f64 },

    #[error("not a marginal kernel: eigenvalue {max} exceeds 1 + 1e-9")]
    NotMarginal { max: f64 },

    #[error("inverse does not exist: marginal kernel has eigenvalue {value} >= 1 - 1e-9")]
    InverseDoesNotExist { value: f64 },

    #[error("similarity undefined: item {index} has zero diagonal (zero quality)")]
    ZeroDiagonal { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("similarity vector {index} is not unit length: |phi| = {norm}")]
    NonUnitPhi { index: usize, norm: f64 },

    #[error("quality {index} is not positive: q = {value}")]
    NonPositiveQuality { index: usize, value: f64 },

    #[error("subset index {index} out of bounds for ground set of size {n}")]
    IndexOutOfBounds { index: usize, n: usize },

    #[error("subset contains duplicate index {index}")]
    DuplicateIndex { index: usize },

    #[error("subsets overlap at index {index}")]
    OverlappingSubsets { index: usize },

    #[error("conditioning event has zero probability")]
    ZeroProbabilityCondition,

    #[error("quality overflow: theta . f = {dot} is not finite")]
    NonFiniteQuality { dot: f64 },

    #[error("instance `{id}` has no gold subset")]
    MissingGold { id: String },

    #[error("eigendecomposition did not converge after {sweeps} Jacobi sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("Cholesky factorization failed: pivot {pivot:e} at step {step} below tolerance")]
    CholeskyFailed { step: usize, pivot: f64 },

    #[error("degenerate direction during orthogonalization: norm {norm:e} below 1e-12")]
    DegenerateDirection { norm: f64 },

    #[error("line search failed: objective not improved after {halvings} step halvings")]
    LineSearchFailed { halvings: usize },

    #[error("item {index} has zero cost but positive gain; gain ratio undefined")]
    ZeroCostPositiveGain { index: usize },

    #[error("ground set of size {n} exceeds brute-force guard of {max}")]
    BruteForceGuard { n: usize, max: usize },

    #[error("empty sample sequence")]
    EmptySamples,

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("malformed matrix file: {0}")]
    MatrixFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DppError>;
