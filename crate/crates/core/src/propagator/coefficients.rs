use num_complex::Complex64;

use crate::model::ComplexMatrix2;

use super::trajectory::PropagatorTrajectory;

/// Samples whose smallest singular value is below this are not inverted.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

/// Coefficients of the exact master equation at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoefficientSample {
    Regular {
        /// Renormalized frequencies `ω_ij(t)` (lab frame).
        omega_ren: ComplexMatrix2,
        /// Dissipation rates `γ_ij(t)`.
        gamma: ComplexMatrix2,
    },
    /// `μ(t)` too close to singular for `μ̇ μ⁻¹`.
    Singular { smallest_singular_value: f64 },
}

impl CoefficientSample {
    pub fn omega_ren(&self) -> Option<ComplexMatrix2> {
        match self {
            CoefficientSample::Regular { omega_ren, .. } => Some(*omega_ren),
            CoefficientSample::Singular { .. } => None,
        }
    }

    pub fn gamma(&self) -> Option<ComplexMatrix2> {
        match self {
            CoefficientSample::Regular { gamma, .. } => Some(*gamma),
            CoefficientSample::Singular { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MasterEquationCoefficients {
    pub times: Vec<f64>,
    pub samples: Vec<CoefficientSample>,
}

/// `ω(t) = (i/2)[μ̇μ⁻¹ − h.c.]` and `γ(t) = −(1/2)[μ̇μ⁻¹ + h.c.]` with `μ̇`
/// from second-order finite differences (one-sided at the ends).
pub fn master_equation_coefficients(traj: &PropagatorTrajectory) -> MasterEquationCoefficients {
    let mu = traj.samples();
    let n = mu.len();
    let h = traj.grid().dt;
    let derivative = |k: usize| -> ComplexMatrix2 {
        if n < 3 {
            return (mu[n - 1] - mu[0]) * (1.0 / (h * (n - 1).max(1) as f64));
        }
        if k == 0 {
            (mu[0] * -3.0 + mu[1] * 4.0 - mu[2]) * (0.5 / h)
        } else if k == n - 1 {
            (mu[n - 1] * 3.0 - mu[n - 2] * 4.0 + mu[n - 3]) * (0.5 / h)
        } else {
            (mu[k + 1] - mu[k - 1]) * (0.5 / h)
        }
    };
    let i = Complex64::i();
    let frame = ComplexMatrix2::identity() * (-i * traj.frame_frequency());
    let samples = (0..n)
        .map(|k| {
            let smallest = mu[k].singular_values().1;
            match mu[k].inverse() {
                Some(inv) if smallest > SINGULAR_THRESHOLD => {
                    // d/dt (e^{−iω_f t} μ̃) (e^{−iω_f t} μ̃)⁻¹ = μ̃'μ̃⁻¹ − iω_f
                    let k_lab = derivative(k) * inv + frame;
                    let adj = k_lab.adjoint();
                    CoefficientSample::Regular { omega_ren: (k_lab - adj) * (i * 0.5), gamma: (k_lab + adj) * -0.5 }
                }
                _ => CoefficientSample::Singular { smallest_singular_value: smallest },
            }
        })
        .collect();
    MasterEquationCoefficients { times: traj.grid().times().collect(), samples }
}
