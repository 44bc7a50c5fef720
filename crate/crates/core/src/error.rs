use thiserror::Error;

/// Errors raised by the geometry, invariant, and closed-form layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("state outside the chart domain: {0}")]
    OutOfDomain(String),

    #[error("squared speed {speed_sq} is not below c^2 = {c_sq}")]
    Superluminal { speed_sq: f64, c_sq: f64 },

    #[error("coordinate singularity on the axis (r = {r}) with nonzero dphi/dt")]
    AxisSingularity { r: f64 },

    #[error("marginal axial regime (epsilon = A): no closed form")]
    MarginalRegime,

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("orbit is not bounded (A >= omega^2 rho^2)")]
    UnboundedOrbit,

    #[error("closed forms are only available on the hyperbolic chart")]
    NotHyperbolic,

    #[error("path enters the forbidden axial region")]
    ForbiddenRegion,

    #[error("invalid motion constants: {0}")]
    InvalidConstants(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("quadrature did not converge (estimated error {error:e})")]
    Quadrature { error: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
