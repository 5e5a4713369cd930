use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::ComplexMatrix2;
use crate::propagator::PropagatorTrajectory;

/// `n_ij = ⟨a_i† a_j⟩` and `s_ij = ⟨a_i a_j⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentState {
    pub n: ComplexMatrix2,
    pub s: ComplexMatrix2,
}

impl MomentState {
    pub fn vacuum() -> Self {
        Self { n: ComplexMatrix2::zeros(), s: ComplexMatrix2::zeros() }
    }

    /// Moments after `a_i → Σ_k μ_ik a_k`: `n → μ* n μᵀ`, `s → μ s μᵀ`.
    pub fn propagate(&self, mu: &ComplexMatrix2) -> Self {
        let mu_t = mu.transpose();
        Self { n: mu.conj() * self.n * mu_t, s: *mu * self.s * mu_t }
    }

    /// Local phase rotation `a_j → e^{iθ_j} a_j`.
    pub fn rotate(&self, theta1: f64, theta2: f64) -> Self {
        self.propagate(&ComplexMatrix2::diag(Complex64::from_polar(1.0, theta1), Complex64::from_polar(1.0, theta2)))
    }

    pub fn populations(&self) -> (f64, f64) {
        (self.n[(0, 0)].re, self.n[(1, 1)].re)
    }
}

/// Independent single-mode squeezed vacua: `n_ii = sinh² r_i`, `s_ii = sinh r_i cosh r_i`.
pub fn initial_moments(r1: f64, r2: f64) -> MomentState {
    let n = ComplexMatrix2::from_real([[r1.sinh().powi(2), 0.0], [0.0, r2.sinh().powi(2)]]);
    let s = ComplexMatrix2::from_real([[r1.sinh() * r1.cosh(), 0.0], [0.0, r2.sinh() * r2.cosh()]]);
    MomentState { n, s }
}

/// Moments at every trajectory sample, in the trajectory's rotating frame.
///
/// `n` is frame independent; the lab-frame `s` is `e^{−2iω_f t} s̃`.
pub fn evolve_moments(traj: &PropagatorTrajectory, m0: &MomentState) -> Vec<MomentState> {
    traj.samples().iter().map(|mu| m0.propagate(mu)).collect()
}
