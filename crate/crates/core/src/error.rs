use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("eigensolver did not converge (matrix seed {seed:?})")]
    NumericalFailure { seed: Option<u64> },

    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("fewer than two usable points for an exponent fit")]
    InsufficientData,

    #[error("exact enumeration over {n} coordinates exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("unsupported entry law for this operation: {0}")]
    UnsupportedLaw(String),

    #[error("only {found} coordinates in the spread band, need {needed}")]
    InsufficientSpread { found: usize, needed: usize },

    #[error("vector is not unit norm (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("zero vector")]
    ZeroVector,

    #[error("vectors are parallel")]
    ParallelVectors,

    #[error("adjacency matrix entry ({row}, {col}) = {value} is not binary")]
    NonBinaryAdjacency { row: usize, col: usize, value: f64 },

    #[error("GAP volume {volume} exceeds the enumeration cap {cap}")]
    VolumeCap { volume: u128, cap: u128 },

    #[error("spectral gap is zero; iteration count is unbounded")]
    GapZero,

    #[error("power iteration broke down: zero image at iteration {iteration}")]
    Breakdown { iteration: usize },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Attaches trial provenance. Matrix seeds are filled into numerical failures.
    pub fn in_trial(self, trial: u64, seed: u64) -> Self {
        let inner = match self {
            Error::NumericalFailure { seed: None } => Error::NumericalFailure { seed: Some(seed) },
            other => other,
        };
        Error::Trial {
            trial,
            source: Box::new(inner),
        }
    }
}
