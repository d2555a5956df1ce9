use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("permutation degree {0} is outside the supported range 1..={1}")]
    DegreeTooLarge(usize, usize),
    #[error("permutation images are not a bijection on 0..{0}")]
    NotBijection(usize),
    #[error("permutation degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("catalan number C_{0} overflows the exact range (max index {1})")]
    Overflow(usize, usize),
    #[error("order k={k} exceeds dimension n={n}; the permutation vectors are not independent")]
    KExceedsN { n: usize, k: usize },
    #[error("order k={0} is above the supported maximum {1}")]
    OrderUnsupported(usize, usize),
    #[error("gram matrix for n={n}, k={k} is singular")]
    SingularGram { n: usize, k: usize },
    #[error("dimension {dim} exceeds the dense limit {limit}")]
    DimensionTooLargeForDense { dim: usize, limit: usize },
    #[error("dimension {dim} exceeds the memory budget {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("vector length {got} does not match expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("sampler {0} has no finite support")]
    NotFiniteSupport(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("matrix {index} is not unitary (residual {residual:.3e})")]
    UnitarityViolation { index: usize, residual: f64 },
    #[error("{0} qubits exceed the dense Clifford budget of {1}")]
    TooManyQubits(usize, usize),
    #[error("power iteration did not converge after {iterations} iterations (last estimate {last_estimate})")]
    NotConverged { iterations: usize, last_estimate: f64 },
    #[error("measure has design order {claimed}, but order {required} is required")]
    OrderTooLow { claimed: usize, required: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("linear algebra backend failed: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Parse { location: location.into(), message: message.into() }
    }
}
