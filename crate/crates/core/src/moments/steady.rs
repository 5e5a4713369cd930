use num_complex::Complex64;

use crate::error::MomentsError;
use crate::model::{ComplexMatrix2, Regime, SystemConfig};
use crate::spectral::markovian_rates;

use super::state::MomentState;

/// Weak-coupling stationary moments for a resonant pair with equal squeezing `r`.
///
/// With `S = γ₁₁ + γ₂₂` and `γ' = γ e^{−2iω_c t}`:
/// `n₁₁ = γ₂₂ sinh²r / S`, `n₂₂ = γ₁₁ sinh²r / S`, `n₁₂ = −γ₁₂ sinh²r / S`,
/// `s₁₁ = γ'₂₂ sinh 2r / 2S`, `s₂₂ = γ'₁₁ sinh 2r / 2S`, `s₁₂ = −γ'₁₂ sinh 2r / 2S`.
/// `t = None` drops the phase, which is the frame rotating at `ω_c`.
pub fn steady_state_moments(config: &SystemConfig, r: f64, t: Option<f64>) -> Result<MomentState, MomentsError> {
    let regimes = config.validate()?;
    if regimes.common() != Some(Regime::Resonant) {
        return Err(MomentsError::Unsupported("steady state needs both cavities at the band center".into()));
    }
    let gamma = markovian_rates(config.omega0, config);
    let (g11, g12, g22) = (gamma[(0, 0)].re, gamma[(0, 1)].re, gamma[(1, 1)].re);
    let total = g11 + g22;
    // Even sites leave only the rounding residue of sin(nπ/2).
    let scale = (config.xi1.powi(2) + config.xi2.powi(2)) / config.xi0;
    if total <= 1e-12 * scale {
        return Err(MomentsError::Unsupported("both cavities sit on even sites and do not decay".into()));
    }
    if r == 0.0 {
        return Ok(MomentState::vacuum());
    }
    let sh2 = r.sinh().powi(2) / total;
    let pair = (2.0 * r).sinh() / (2.0 * total);
    let phase = t.map_or(Complex64::new(1.0, 0.0), |t| Complex64::from_polar(1.0, -2.0 * config.omega0 * t));
    Ok(MomentState {
        n: ComplexMatrix2::from_real([[g22 * sh2, -g12 * sh2], [-g12 * sh2, g11 * sh2]]),
        s: ComplexMatrix2::from_real([[g22 * pair, -g12 * pair], [-g12 * pair, g11 * pair]]) * phase,
    })
}
