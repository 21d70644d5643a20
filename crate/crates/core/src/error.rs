use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension must be at least {min}, got {dim}")]
    DimensionTooSmall { dim: usize, min: usize },
    #[error("matrix has {found} entries, expected {expected}")]
    BadLength { expected: usize, found: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("spectrum [{min_eig}, {max_eig}] is outside the effect interval")]
    NotAnEffect { min_eig: f64, max_eig: f64 },
    #[error("matrix is not a projection (deviation {deviation:e})")]
    NotAProjection { deviation: f64 },
    #[error("effects are not summable: largest eigenvalue of the sum is {max_eig}")]
    NotSummable { max_eig: f64 },
    #[error("convex weight {0} is outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error("zero vector has no rank-one projection")]
    ZeroVector,
    #[error("trace {0} is not within 0.01 of an integer rank")]
    RankNotInteger(f64),
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(&'static str),
    #[error("cannot compose a complemented descriptor with a sign-flipped one")]
    FamilyMismatch,
    #[error("operator norm {0} exceeds 1")]
    NormTooLarge(f64),
    #[error("map does not vanish at 0 (norm {0:e})")]
    NonzeroAtZero(f64),
    #[error("map is not affine (deviation {deviation:e})")]
    NotAffine { deviation: f64 },
    #[error("image is not a rank-one projection (eigenvalues {top} and {rest})")]
    NotRankOne { top: f64, rest: f64 },
    #[error("images of basis projections {i} and {j} are not orthogonal (overlap {overlap:e})")]
    ImagesNotOrthogonal { i: usize, j: usize, overlap: f64 },
    #[error("phase alignment of column {column} is degenerate (overlap {overlap:e})")]
    DegeneratePhase { column: usize, overlap: f64 },
    #[error("reconstructed operator fails verification (residual {residual:e})")]
    VerificationFailed { residual: f64 },
    #[error("oracle evaluation failed: {0}")]
    Oracle(String),
}
