use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::MomentsError;

use super::state::MomentState;

/// Slack allowed on the uncertainty relation and purity bound.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;
const RADICAND_TOLERANCE: f64 = 1e-12;
/// `λ` within this of `1/2` counts as separable.
pub const LAMBDA_TOLERANCE: f64 = 1e-12;

/// Symmetrised quadrature covariance over `(X₁, Y₁, X₂, Y₂)` with
/// `X = (a + a†)/√2`, `Y = (a − a†)/(i√2)`; the vacuum is `I/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceMatrix {
    chi: Matrix4<f64>,
}

impl CovarianceMatrix {
    /// Assembles `χ` without checking physicality.
    pub fn from_moments_unchecked(m: &MomentState) -> Self {
        let mut chi = Matrix4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let delta = if i == j { 0.5 } else { 0.0 };
                let n = m.n[(i, j)];
                let s = m.s[(i, j)];
                chi[(2 * i, 2 * j)] = delta + n.re + s.re;
                chi[(2 * i + 1, 2 * j + 1)] = delta + n.re - s.re;
                chi[(2 * i, 2 * j + 1)] = s.im + n.im;
            }
        }
        // ⟨{X_i, Y_j}⟩/2 fills both off-diagonal quadrature slots.
        for i in 0..2 {
            for j in 0..2 {
                chi[(2 * j + 1, 2 * i)] = chi[(2 * i, 2 * j + 1)];
            }
        }
        Self { chi }
    }

    /// Assembles `χ` and checks `χ + (i/2)Ω ⪰ 0` and `Det χ ≥ 1/16`.
    pub fn from_moments(m: &MomentState) -> Result<Self, MomentsError> {
        let chi = Self::from_moments_unchecked(m);
        chi.check_physical()?;
        Ok(chi)
    }

    pub fn from_matrix(chi: Matrix4<f64>) -> Self {
        Self { chi }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.chi
    }

    /// Local block of mode 1.
    pub fn rho1(&self) -> Matrix2<f64> {
        self.chi.fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// Local block of mode 2.
    pub fn rho2(&self) -> Matrix2<f64> {
        self.chi.fixed_view::<2, 2>(2, 2).into_owned()
    }

    /// Correlation block between the modes.
    pub fn rho3(&self) -> Matrix2<f64> {
        self.chi.fixed_view::<2, 2>(0, 2).into_owned()
    }

    pub fn det(&self) -> f64 {
        self.chi.determinant()
    }

    /// Smallest eigenvalue of the Hermitian matrix `χ + (i/2)Ω`.
    pub fn uncertainty_margin(&self) -> f64 {
        let mut h = self.chi.map(|v| Complex64::new(v, 0.0));
        for b in [0, 2] {
            h[(b, b + 1)] += Complex64::new(0.0, 0.5);
            h[(b + 1, b)] -= Complex64::new(0.0, 0.5);
        }
        SymmetricEigen::new(h).eigenvalues.min()
    }

    pub fn check_physical(&self) -> Result<(), MomentsError> {
        let margin = self.uncertainty_margin();
        if margin < -PHYSICALITY_TOLERANCE {
            return Err(MomentsError::Unphysical(format!("chi + i/2 Omega has eigenvalue {margin:e}")));
        }
        let det = self.det();
        if det < 1.0 / 16.0 - PHYSICALITY_TOLERANCE {
            return Err(MomentsError::Unphysical(format!("Det chi = {det} is below 1/16")));
        }
        Ok(())
    }
}

fn clamp_radicand(value: f64, scale: f64, what: &str) -> Result<f64, MomentsError> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -RADICAND_TOLERANCE * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(MomentsError::Unphysical(format!("negative {what} radicand {value:e}")))
    }
}

/// Below this ratio `D/Δ²` the discriminant loses half its digits to
/// cancellation and `λ` comes from a Hermitian eigenproblem instead.
const DISCRIMINANT_SPLIT: f64 = 1e-4;

/// `(E_N, λ)` with `λ` the smallest symplectic eigenvalue of the partial
/// transpose and `E_N = max(0, −ln 2λ)`; `λ ≥ 1/2 − 10⁻¹²` gives `E_N = 0`.
pub fn logarithmic_negativity(chi: &CovarianceMatrix) -> Result<(f64, f64), MomentsError> {
    let delta = chi.rho1().determinant() + chi.rho2().determinant() - 2.0 * chi.rho3().determinant();
    let det = chi.det();
    let disc = delta * delta - 4.0 * det;
    let lambda = if disc > DISCRIMINANT_SPLIT * delta * delta {
        // λ² = (Δ − √D)/2 = 2 Det χ / (Δ + √D), the second form without cancellation.
        (2.0 * det / (delta + disc.sqrt())).sqrt()
    } else {
        clamp_radicand(disc, delta * delta, "discriminant")?;
        near_degenerate_lambda(chi)?
    };
    let e_n = if lambda < 0.5 - LAMBDA_TOLERANCE { -(2.0 * lambda).ln() } else { 0.0 };
    Ok((e_n, lambda))
}

/// Smallest positive eigenvalue of `i √χ̃ Ω √χ̃`, with `χ̃` the partial
/// transpose; Hermitian, so nearly equal symplectic eigenvalues stay accurate.
fn near_degenerate_lambda(chi: &CovarianceMatrix) -> Result<f64, MomentsError> {
    let flip = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
    let transposed = flip * chi.chi * flip;
    let eig = SymmetricEigen::new(transposed);
    if eig.eigenvalues.min() <= 0.0 {
        return Err(MomentsError::Unphysical("covariance matrix is not positive definite".into()));
    }
    let root =
        eig.eigenvectors * Matrix4::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
    let mut omega = Matrix4::zeros();
    for b in [0, 2] {
        omega[(b, b + 1)] = 1.0;
        omega[(b + 1, b)] = -1.0;
    }
    let h = (root * omega * root).map(|v| Complex64::new(0.0, v));
    let spectrum = SymmetricEigen::new(h).eigenvalues;
    Ok(spectrum.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min))
}

/// `P = 1/(4√Det χ)`.
pub fn purity(chi: &CovarianceMatrix) -> Result<f64, MomentsError> {
    let det = chi.det();
    if det < 1.0 / 16.0 - PHYSICALITY_TOLERANCE {
        return Err(MomentsError::Unphysical(format!("Det chi = {det} is below 1/16")));
    }
    Ok(1.0 / (4.0 * det.sqrt()))
}
