use std::fmt;

use thiserror::Error;

/// A single violated configuration invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("waveguide hopping xi0 must be positive (got {xi0})")]
    NonPositiveHopping { xi0: f64 },
    #[error("{field} must be positive (got {value})")]
    NonPositiveFrequency { field: &'static str, value: f64 },
    #[error("{field} must be non-negative (got {value})")]
    NegativeCoupling { field: &'static str, value: f64 },
    #[error("{field} must be non-negative (got {value})")]
    NegativeSqueezing { field: &'static str, value: f64 },
    #[error("{field} must be a site index >= 1 (got {value})")]
    InvalidSite { field: &'static str, value: u32 },
    #[error("both cavities are attached to site {site}")]
    CoincidentSites { site: u32 },
    #[error("{field} is not finite")]
    NonFinite { field: &'static str },
    #[error("time step must be positive (got {dt})")]
    NonPositiveStep { dt: f64 },
    #[error("time grid has no steps")]
    EmptyGrid,
}

/// Every invariant a configuration violates.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationErrors(pub Vec<ValidationError>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "invalid configuration: {}", msgs.join("; "))
    }
}

impl std::error::Error for ValidationErrors {}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    /// Evaluation at or beyond a band edge of a quantity defined only inside.
    #[error("frequency {omega} lies outside the open band ({lower}, {upper})")]
    OutsideBand { omega: f64, lower: f64, upper: f64 },
    #[error("quadrature did not reach tolerance {tolerance:e}: estimate {estimate} with error {error:e}")]
    NoConvergence { estimate: f64, error: f64, tolerance: f64 },
    #[error(
        "principal value did not converge: estimate {estimate} with error {error:e} after {intervals} subintervals"
    )]
    PrincipalValue { estimate: f64, error: f64, intervals: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagatorError {
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    /// `dt` times the named frequency scale exceeds the allowed bound.
    #[error("time step {dt} too large: dt * {scale} = {product:.3} (must be < {limit})")]
    StepTooLarge { dt: f64, scale: &'static str, product: f64, limit: f64 },
    #[error("solution became non-finite at step {index} (last good step {last_good})")]
    NumericalFailure { index: usize, last_good: usize },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    /// Finite-chain time window reaches the reflection from the far end.
    #[error("end time {t_max} exceeds the reflection-free horizon {horizon} of the finite chain")]
    BeyondHorizon { t_max: f64, horizon: f64 },
    #[error("chain of {length} sites is too short for attachment site {site} (need >= {required})")]
    ChainTooShort { length: usize, site: u32, required: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentsError {
    /// Uncertainty relation or purity bound violated beyond tolerance.
    #[error("covariance matrix is unphysical: {0}")]
    Unphysical(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
}
