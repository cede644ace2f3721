use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum ToaError {
    /// A constructor or operation was given a parameter outside its domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Evaluation requested outside the representable domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A state failed a structural requirement (e.g. zero norm).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Two states cannot be combined (mass or grid mismatch).
    #[error("incompatible states: {0}")]
    IncompatibleStates(String),

    /// A quadrature grid cannot resolve the fastest oscillation of the
    /// integrand. The message names the offending parameter.
    #[error("resolution guard: {0}")]
    Resolution(String),

    /// A reduction kernel has support crossing p = 0.
    #[error("sector violation: {0}")]
    SectorViolation(String),

    /// The requested map is undefined for the given input (e.g. the
    /// classical arrival map at x0 = 0, or moments of a zero-mass density).
    #[error("undefined: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, ToaError>;
