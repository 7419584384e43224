use thiserror::Error;

/// Errors produced by the detection library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("malformed permutation {0:?}")]
    BadPermutation(Vec<usize>),

    #[error("dimension must be at least {min}, got {got}")]
    DimensionTooSmall { min: usize, got: usize },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max |U^dagger U - I| = {0:.3e})")]
    NotUnitary(f64),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unknown channel name `{0}`")]
    UnknownChannel(String),

    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("invalid probability: {0}")]
    InvalidProbability(String),

    #[error("map is not trace preserving (max |sum A^dagger A - I| = {0:.6})")]
    NotTracePreserving(f64),

    #[error("map is not completely positive (Choi eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),

    #[error("Choi matrix of the conjugated map has no negative eigenvalue (min {0:.3e})")]
    NoNegativeEigenvalue(f64),

    #[error("witness is missing reference overlap coefficients")]
    MissingReferenceCoefficients,

    #[error("Pauli generators {0} and {1} do not commute")]
    NonCommutingGenerators(usize, usize),

    #[error("Pauli generators are not independent")]
    DependentGenerators,

    #[error("invalid Pauli string `{0}`")]
    BadPauliString(String),

    #[error("numerical validation failed: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
