//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} exceeds the supported maximum {max}", max = crate::numerics::MAX_DIM)]
    DimensionTooLarge(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("entries must be finite")]
    NonFinite,

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid subsystem layout: {0}")]
    InvalidLayout(String),

    #[error("unknown subsystem label {0:?}")]
    UnknownSubsystem(String),

    #[error("operation requires a bipartite layout, found {0} subsystems")]
    NotBipartite(usize),

    #[error("basis is not orthonormal (max Gram deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("not a density operator: {0}")]
    NotDensity(String),

    #[error("invalid apparatus: {0}")]
    InvalidApparatus(String),

    #[error("apparatus is not in its ready state")]
    ApparatusNotReady,

    #[error("projectors do not sum to the identity (max deviation {0:.3e})")]
    IncompleteProjectors(f64),

    #[error("negative probability {0:.3e}")]
    NegativeProbability(f64),

    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),

    #[error("which-path overlap magnitude {0} exceeds 1")]
    OverlapOutOfRange(f64),

    #[error("collision count {requested} exceeds the configured maximum {max}")]
    CollisionLimit { requested: usize, max: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("all optical paths blocked, nothing reaches the detectors")]
    Blocked,

    #[error("deserialization failed: {0}")]
    Deserialize(String),
}
