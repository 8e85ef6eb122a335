use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A polynomial operation would produce a term above the degree cap.
    #[error("degree {degree} exceeds polynomial capacity {cap}")]
    Capacity { degree: u32, cap: u32 },

    /// Tensor-product or matrix dimension above the configured limit.
    #[error("dimension {dim} exceeds configured cap {cap}")]
    Dimension { dim: usize, cap: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Probability mass lost past the Fock truncation exceeds tolerance.
    #[error("truncation tail mass {tail_mass:e} above tolerance {tolerance:e}")]
    Truncation { tail_mass: f64, tolerance: f64 },

    /// Creation operator applied to a vector with weight on the top level.
    #[error("creation operator overflows truncation N = {truncation}")]
    TruncationOverflow { truncation: usize },

    #[error("rejection sampler efficiency {efficiency:e} below 1e-3")]
    Sampler { efficiency: f64 },

    #[error("integrator unstable: {0}")]
    Instability(String),

    #[error("numerical consistency failure: {0}")]
    Consistency(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn parameter<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
