use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{ComplexMatrix2, SystemConfig, TimeGrid};

/// Which solver produced a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Volterra,
    WeakCoupling,
    FiniteChain,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Volterra => "volterra",
            Method::WeakCoupling => "weak-coupling",
            Method::FiniteChain => "finite-chain",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            Method::Volterra => 1,
            Method::WeakCoupling => 2,
            Method::FiniteChain => 3,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(Method::Volterra),
            2 => Some(Method::WeakCoupling),
            3 => Some(Method::FiniteChain),
            _ => None,
        }
    }
}

/// Samples `μ̃(t_k) = e^{iω_f t_k} μ(t_k)` of the propagating function.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagatorTrajectory {
    config: SystemConfig,
    grid: TimeGrid,
    frame_frequency: f64,
    method: Method,
    samples: Vec<ComplexMatrix2>,
}

impl PropagatorTrajectory {
    /// `samples` must hold exactly `grid.len()` entries.
    pub fn new(
        config: SystemConfig,
        grid: TimeGrid,
        frame_frequency: f64,
        method: Method,
        samples: Vec<ComplexMatrix2>,
    ) -> Self {
        assert_eq!(samples.len(), grid.len(), "one sample per grid point");
        Self { config, grid, frame_frequency, method, samples }
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn frame_frequency(&self) -> f64 {
        self.frame_frequency
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn samples(&self) -> &[ComplexMatrix2] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.grid.time(k)
    }

    /// Lab-frame `μ(t_k) = e^{−iω_f t_k} μ̃(t_k)`.
    pub fn lab(&self, k: usize) -> ComplexMatrix2 {
        self.samples[k] * Complex64::from_polar(1.0, -self.frame_frequency * self.time(k))
    }

    /// The same trajectory expressed in a frame rotating at `frame_frequency`.
    pub fn in_frame(&self, frame_frequency: f64) -> Self {
        let shift = frame_frequency - self.frame_frequency;
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, m)| *m * Complex64::from_polar(1.0, shift * self.time(k)))
            .collect();
        Self { samples, frame_frequency, ..self.clone() }
    }

    /// Largest singular value over all samples.
    pub fn max_singular_value(&self) -> f64 {
        self.samples.iter().map(|m| m.singular_values().0).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from another trajectory on the same grid.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.samples.iter().zip(&other.samples).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
    }
}
