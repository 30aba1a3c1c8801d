use thiserror::Error;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// The requested operation is not available for this model, solver or sampler.
    #[error("capability error: {0}")]
    Capability(String),

    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Malformed input data (mismatched marginals, non-monotone grid, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// A spectral sum was requested in a regime where it diverges.
    #[error("regime error: {0}")]
    Regime(String),

    /// An iterative solver ran out of budget.
    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("unknown {kind} id '{id}'")]
    UnknownId { kind: &'static str, id: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn capability(msg: impl Into<String>) -> Error {
    Error::Capability(msg.into())
}

pub(crate) fn parameter(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}
