//! The cavity propagating function `μ(t)`: exact, weak-coupling and
//! finite-chain evaluations, and the master-equation coefficients it implies.

mod chain;
mod coefficients;
pub mod io;
mod trajectory;
mod volterra;
mod weak;

pub use chain::{finite_chain_oracle, reflection_horizon, DEFAULT_CHAIN_LENGTH, HORIZON_GUARD};
pub use coefficients::{
    master_equation_coefficients, CoefficientSample, MasterEquationCoefficients, SINGULAR_THRESHOLD,
};
pub use trajectory::{Method, PropagatorTrajectory};
pub use volterra::{check_step, resume_volterra, solve_volterra, HistorySum, VolterraOptions, STEP_LIMIT};
pub use weak::weak_coupling_propagator;
