use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The threshold circuit is not driven above threshold, so the averaged
    /// form of its dynamics does not apply.
    #[error("validity error: {0}")]
    Validity(String),

    /// kappa == p: the fixed point has moved to infinity.
    #[error("degenerate fixed point: kappa equals p, no finite fixed point exists")]
    DegenerateFixedPoint,

    /// The request is well-formed but not meaningful for this configuration,
    /// e.g. asking for a relaxation time of an unstable fixed point.
    #[error("invalid request: {0}")]
    InvalidRequest(String),

    /// Log-linear fit rejected its input.
    #[error("fit quality error: {0}")]
    FitQuality(String),

    /// A root search or iteration failed to converge.
    #[error("numeric failure: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
