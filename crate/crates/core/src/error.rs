use thiserror::Error;

/// Errors shared across the kernel, dilation, criterion, ODE and solver modules.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input failed structural validation (mathematical hypothesis, config shape, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A quadrature did not reach the requested tolerance within its budget.
    #[error("accuracy error: requested {requested:e}, achieved {achieved:e} ({context})")]
    Accuracy {
        requested: f64,
        achieved: f64,
        context: String,
    },

    /// The evaluation box/grid cannot represent the requested quantity
    /// (tail mass above the configured bound, odd grid, ...).
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A divergence hypothesis fails (accumulated dilation stays bounded).
    #[error("divergence error: {0}")]
    Divergence(String),

    /// A precondition established elsewhere does not hold for this input.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// A Picard iterate escaped the invariant ball (tau or R misconfigured).
    #[error("ball violation: {0}")]
    BallViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
