use thiserror::Error;

use crate::phase::FrequencyQuad;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("ratio undefined for the zero field")]
    UndefinedRatio,

    #[error("phase vanishes on {0:?}")]
    ResonantQuad(FrequencyQuad),

    #[error("blowup detected at t = {time}")]
    BlowupDetected { time: f64 },

    #[error("degenerate estimator: {0}")]
    DegenerateEstimator(String),

    #[error("phase-space dimension too large: cutoff {cutoff} exceeds {max}")]
    UnsupportedDimension { cutoff: usize, max: usize },
}

impl LabError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LabError::InvalidParameter(msg.into())
    }

    pub(crate) fn regime(msg: impl Into<String>) -> Self {
        LabError::UnsupportedRegime(msg.into())
    }
}
