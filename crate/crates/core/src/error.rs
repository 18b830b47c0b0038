use thiserror::Error;

/// Errors raised while building, evaluating or reducing experiment designs.
#[derive(Debug, Error)]
pub enum GstError {
    #[error("unknown gate label `{0}`")]
    UnknownLabel(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid gate set: {0}")]
    InvalidGateSet(String),

    #[error("gauge transform is singular or ill-conditioned (condition number {0:.3e})")]
    SingularTransform(f64),

    #[error("eigen-decomposition failed: {0}")]
    Eigensolver(String),

    #[error("eigenbasis is ill-conditioned (condition number {0:.3e})")]
    IllConditionedBasis(f64),

    #[error("fiducial pool is not informationally complete: rank {achieved} of {required}")]
    NotInformationallyComplete { achieved: usize, required: usize },

    #[error("germ candidates are not amplificationally complete: rank {achieved} of {required}")]
    NotAmplificationallyComplete { achieved: usize, required: usize },

    #[error("plaquette for germ {germ} at depth {depth} has no fiducial pairs")]
    EmptyPlaquette { germ: usize, depth: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("probability {0:.3e} is negative; model is not a valid probability model")]
    NegativeProbability(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GstError>;
