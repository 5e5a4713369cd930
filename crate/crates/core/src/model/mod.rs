//! Configuration and value types shared by every other module.

mod config;
mod matrix;

pub use config::{validate_run, Cavity, Regime, Regimes, SystemConfig, TimeGrid, RESONANCE_TOLERANCE};
pub use matrix::ComplexMatrix2;
