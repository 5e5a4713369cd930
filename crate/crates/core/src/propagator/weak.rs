use num_complex::Complex64;

use crate::error::PropagatorError;
use crate::model::{validate_run, ComplexMatrix2, Regime, SystemConfig, TimeGrid, RESONANCE_TOLERANCE};
use crate::spectral::{lamb_shift_matrix, markovian_rates};

use super::trajectory::{Method, PropagatorTrajectory};

/// Markovian propagating function `μ(t) = exp(−(γ + iω̄)t)` with constant
/// `γ = J(ω_c)/2` and `ω̄ = ω_c I − δω(ω_c)`, returned in the frame rotating
/// at `ω₀`.
///
/// Requires both cavities at `omega_c`. At the band center with `δω = 0` the
/// rank-one closed form is used instead of the matrix exponential.
pub fn weak_coupling_propagator(
    config: &SystemConfig,
    grid: &TimeGrid,
    omega_c: f64,
) -> Result<PropagatorTrajectory, PropagatorError> {
    validate_run(config, grid)?;
    let tol = RESONANCE_TOLERANCE * omega_c.abs().max(1.0);
    if (config.omega_c1 - omega_c).abs() > tol || (config.omega_c2 - omega_c).abs() > tol {
        return Err(PropagatorError::Unsupported(format!(
            "weak-coupling form needs omega_c1 = omega_c2 = {omega_c} (got {}, {})",
            config.omega_c1, config.omega_c2
        )));
    }
    let frame = config.omega0;
    let gamma = markovian_rates(omega_c, config);
    let resonant = Regime::classify(omega_c, config.omega0, config.xi0) == Regime::Resonant;
    // At the band center the shift vanishes identically when n1 + n2 is even.
    let unshifted = resonant && (config.n1 + config.n2) % 2 == 0;
    let shift = if unshifted { ComplexMatrix2::zeros() } else { lamb_shift_matrix(omega_c, config)? };
    let total = (gamma[(0, 0)] + gamma[(1, 1)]).re;

    let samples = if unshifted && total > 0.0 {
        let (g11, g12, g22) = (gamma[(0, 0)].re, gamma[(0, 1)].re, gamma[(1, 1)].re);
        grid.times()
            .map(|t| {
                let decay = (-total * t).exp();
                let phase = Complex64::from_polar(1.0 / total, -(omega_c - frame) * t);
                let m11 = (g22 + g11 * decay) * phase;
                let m22 = (g11 + g22 * decay) * phase;
                let m12 = -(g12 * (1.0 - decay)) * phase;
                ComplexMatrix2::new(m11, m12, m12, m22)
            })
            .collect()
    } else {
        let i = Complex64::i();
        let bar = ComplexMatrix2::identity() * (omega_c - frame) - shift;
        let generator = -(gamma + bar * i);
        grid.times().map(|t| (generator * t).exp()).collect()
    };
    Ok(PropagatorTrajectory::new(*config, *grid, frame, Method::WeakCoupling, samples))
}
