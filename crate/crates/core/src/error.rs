use thiserror::Error;

/// Errors reported by validation and numerical routines.
///
/// Tolerance-based checks carry the measured defect so callers can tell a
/// borderline case from a badly malformed input.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("trace must be 1, got deviation {0:.3e}")]
    InvalidTrace(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),

    #[error("Schatten order must be >= 1, got {0}")]
    InvalidNormOrder(f64),

    #[error("rank must be between 1 and the dimension, got {rank} for dim {dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("a measurement needs at least two elements, got {0}")]
    TooFewElements(usize),

    #[error("measurement elements do not sum to the identity (defect {0:.3e})")]
    IncompleteMeasurement(f64),

    #[error("measurement elements are not orthogonal projectors (defect {0:.3e})")]
    NotProjective(f64),

    #[error("measurement element is not a rank-1 projector (residual weight {0:.3e})")]
    NotRank1Pvm(f64),

    #[error("operation requires a rank-1 projective measurement")]
    RequiresRank1Basis,

    #[error("POVM normalizer is numerically singular (min eigenvalue {0:.3e})")]
    SingularNormalizer(f64),

    #[error("Kraus operators are not trace preserving (defect {0:.3e})")]
    NotTracePreserving(f64),

    #[error("state vector is not normalized (deviation {0:.3e})")]
    NotNormalized(f64),

    #[error("dimensions {0}x{1} do not factor the joint dimension {2}")]
    BadFactorization(usize, usize, usize),

    #[error("inverse temperature must be nonnegative, got {0}")]
    NegativeBeta(f64),

    #[error("index {index} out of range for {len} outcomes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error(
        "finite differencing needs an interior grid point with both neighbors inside the horizon"
    )]
    BoundaryPoint,

    #[error("trajectory must contain at least two grid points")]
    EmptyTrajectory,

    #[error("a time evolution needs at least one step")]
    InvalidSteps,

    #[error("operation requires a qubit (dimension 2), got dimension {0}")]
    NotQubit(usize),

    #[error("Bloch vector lies outside the unit ball (norm {0})")]
    OutsideBall(f64),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
