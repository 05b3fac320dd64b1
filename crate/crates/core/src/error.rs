use thiserror::Error;

/// Errors produced by the geometric constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("isometry is not hyperbolic (|trace| = {trace})")]
    NotHyperbolic { trace: f64 },

    #[error("degenerate axis: endpoints coincide")]
    DegenerateAxis,

    #[error("coincident points")]
    CoincidentPoints,

    #[error("geodesic ray does not cross the axis transversally")]
    RayMissesAxis,

    #[error("invalid nested-sequence spec: {0}")]
    SpecInvalid(String),

    #[error("depth overflow at generator {index}: {reason}")]
    DepthOverflow { index: usize, reason: String },

    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    #[error("index error: {0}")]
    IndexError(String),

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("insufficient depth: {0}")]
    InsufficientDepth(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
