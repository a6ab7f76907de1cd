use thiserror::Error;

/// Errors raised by the laboratory computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("position {q} outside the domain [{lo}, {hi}] of the {potential} potential")]
    Domain {
        potential: &'static str,
        q: f64,
        lo: f64,
        hi: f64,
    },

    #[error("integration left the domain after step {last_valid}: {reason}")]
    LeftDomain { last_valid: usize, reason: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("series length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("every sample is masked (no |p| above the momentum floor)")]
    FullyMasked,

    #[error("no unmasked span of at least {needed} contiguous samples")]
    SpanTooShort { needed: usize },

    #[error("index range [{i1}, {i2}] is invalid or touches a flagged gap")]
    BadInterval { i1: usize, i2: usize },

    #[error("wall model violated at t = {t}: particle speed {speed} cannot catch wall speed {wall_speed}")]
    ModelViolation { t: f64, speed: f64, wall_speed: f64 },

    #[error("requested {requested} states but the grid only has {available} interior points")]
    TooManyStates { requested: usize, available: usize },

    #[error("empty region: {0}")]
    EmptyRegion(&'static str),

    /// The last iterate is kept so callers can inspect or restart from it.
    #[error(
        "descent did not converge in {iterations} iterations (last energy {energy}, last relative change {change:e})"
    )]
    NotConverged {
        iterations: usize,
        energy: f64,
        change: f64,
        last_iterate: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
