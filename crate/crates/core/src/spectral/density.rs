use std::f64::consts::FRAC_2_PI;

use crate::error::SpectralError;
use crate::model::{Cavity, ComplexMatrix2, SystemConfig, RESONANCE_TOLERANCE};

fn outside(omega: f64, config: &SystemConfig) -> SpectralError {
    let (lower, upper) = config.band();
    SpectralError::OutsideBand { omega, lower, upper }
}

/// Wavenumber `k ∈ (0, π)` of the band mode at frequency `omega`.
///
/// Errors at or beyond the band edges (within a relative `1e-12`).
pub fn wavenumber(omega: f64, config: &SystemConfig) -> Result<f64, SpectralError> {
    let x = (config.omega0 - omega) / (2.0 * config.xi0);
    if x.is_finite() && x.abs() < 1.0 - RESONANCE_TOLERANCE {
        Ok(x.acos())
    } else {
        Err(outside(omega, config))
    }
}

/// `ρ(ω) = 1/√(4ξ₀² − (ω − ω₀)²)` inside the open band.
pub fn density_of_states(omega: f64, config: &SystemConfig) -> Result<f64, SpectralError> {
    wavenumber(omega, config)?;
    let d = omega - config.omega0;
    Ok(1.0 / (4.0 * config.xi0 * config.xi0 - d * d).sqrt())
}

/// `V_i(ω) = √(2/π) ξ_i sin(n_i k(ω))`.
pub fn coupling_profile(i: Cavity, omega: f64, config: &SystemConfig) -> Result<f64, SpectralError> {
    let k = wavenumber(omega, config)?;
    Ok(FRAC_2_PI.sqrt() * config.coupling(i) * (config.site(i) as f64 * k).sin())
}

/// `J_ij(ω) = 2π ρ(ω) V_i(ω) V_j(ω)` inside the open band.
pub fn spectral_density(i: Cavity, j: Cavity, omega: f64, config: &SystemConfig) -> Result<f64, SpectralError> {
    let k = wavenumber(omega, config)?;
    Ok(density_at(i, j, k, config))
}

/// [`spectral_density`] extended by zero outside the band and at its edges.
pub fn spectral_density_in_band(i: Cavity, j: Cavity, omega: f64, config: &SystemConfig) -> f64 {
    wavenumber(omega, config).map_or(0.0, |k| density_at(i, j, k, config))
}

// k-form: 2 ξ_i ξ_j sin(n_i k) sin(n_j k) / (ξ₀ sin k)
fn density_at(i: Cavity, j: Cavity, k: f64, config: &SystemConfig) -> f64 {
    let (i, j) = if i.index() <= j.index() { (i, j) } else { (j, i) };
    let si = (config.site(i) as f64 * k).sin();
    let sj = (config.site(j) as f64 * k).sin();
    2.0 * config.coupling(i) * config.coupling(j) * si * sj / (config.xi0 * k.sin())
}

/// The full 2×2 spectral-density matrix of a configuration.
#[derive(Clone, Copy, Debug)]
pub struct SpectralDensityMatrix {
    config: SystemConfig,
}

impl SpectralDensityMatrix {
    pub fn new(config: &SystemConfig) -> Self {
        Self { config: *config }
    }

    pub fn band(&self) -> (f64, f64) {
        self.config.band()
    }

    /// `J(ω)` with zero outside the band.
    pub fn at(&self, omega: f64) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        if let Ok(k) = wavenumber(omega, &self.config) {
            for i in Cavity::BOTH {
                for j in Cavity::BOTH {
                    out[i.index()][j.index()] = density_at(i, j, k, &self.config);
                }
            }
        }
        out
    }

    pub fn entry(&self, i: Cavity, j: Cavity, omega: f64) -> f64 {
        self.at(omega)[i.index()][j.index()]
    }
}

/// Time-independent damping matrix `γ = J(ω_c)/2`; zero outside the band.
pub fn markovian_rates(omega_c: f64, config: &SystemConfig) -> ComplexMatrix2 {
    ComplexMatrix2::from_real(SpectralDensityMatrix::new(config).at(omega_c)).scale_re(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_real;
    use std::f64::consts::PI;
    use Cavity::{First, Second};

    fn fig2(n2: u32) -> SystemConfig {
        SystemConfig::symmetric(1.0, 0.05, 0.2, 1, n2, 1.0)
    }

    #[test]
    fn density_of_states_values() {
        let c = fig2(5);
        assert!((density_of_states(1.0, &c).unwrap() - 10.0).abs() < 1e-12);
        let w = 1.0 + 1.9 * 0.05;
        let want = 1.0 / (0.05 * (4.0f64 - 3.61).sqrt());
        assert!((density_of_states(w, &c).unwrap() - want).abs() < 1e-9);
        assert!(density_of_states(1.1, &c).is_err());
        assert!(density_of_states(0.9, &c).is_err());
    }

    #[test]
    fn coupling_profile_at_band_centre() {
        let mut c = fig2(5);
        let v = FRAC_2_PI.sqrt() * c.xi1;
        assert!((coupling_profile(First, 1.0, &c).unwrap() - v).abs() < 1e-15);
        assert!((coupling_profile(Second, 1.0, &c).unwrap() - v).abs() < 1e-15);
        c.n2 = 4;
        assert!(coupling_profile(Second, 1.0, &c).unwrap().abs() < 1e-15);
    }

    #[test]
    fn wavenumber_branch_is_monotone() {
        let c = fig2(5);
        assert!(wavenumber(0.95, &c).unwrap() < PI / 2.0);
        assert!(wavenumber(1.05, &c).unwrap() > PI / 2.0);
    }

    #[test]
    fn spectral_density_values() {
        let c = fig2(5);
        assert!((spectral_density(First, First, 1.0, &c).unwrap() - 4e-3).abs() < 1e-15);
        let c4 = fig2(4);
        assert!(spectral_density(First, Second, 1.0, &c4).unwrap().abs() < 1e-15);
        assert_eq!(spectral_density_in_band(First, First, 1.0 + 3.0 * 0.05, &c), 0.0);
        assert!(spectral_density(First, First, 1.15, &c).is_err());
    }

    #[test]
    fn spectral_density_matches_factorised_definition() {
        let c = fig2(3);
        for &w in &[0.92, 0.97, 1.0, 1.04, 1.0999] {
            let want = 2.0
                * PI
                * density_of_states(w, &c).unwrap()
                * coupling_profile(First, w, &c).unwrap()
                * coupling_profile(Second, w, &c).unwrap();
            let got = spectral_density(First, Second, w, &c).unwrap();
            assert!((got - want).abs() < 1e-12 * want.abs().max(1e-3));
        }
    }

    #[test]
    fn spectral_weight_equals_kernel_at_zero_delay() {
        // ∫ dω/2π J_ii(ω) = ξ_i², integrated directly in ω with edge-clustered panels.
        let c = fig2(5);
        let (lo, hi) = c.band();
        let breaks: Vec<f64> = (0..=64)
            .map(|m| {
                let u = m as f64 / 64.0 * PI;
                lo + (hi - lo) * 0.5 * (1.0 - u.cos())
            })
            .collect();
        let q = integrate_real(|w| spectral_density_in_band(Second, Second, w, &c) / (2.0 * PI), &breaks, 1e-12, 4000);
        assert!((q.value.re - c.xi2 * c.xi2).abs() < 1e-9, "{}", q.value.re);
    }

    #[test]
    fn markovian_rates_resonant_and_out_of_band() {
        let c = fig2(5);
        let g = markovian_rates(1.0, &c);
        let g11 = 2.0 * c.xi1 * c.xi1 / c.xi0 / 2.0;
        assert!((g[(0, 0)].re - g11).abs() < 1e-15);
        assert!((g[(0, 1)].re - (g[(0, 0)].re * g[(1, 1)].re).sqrt()).abs() < 1e-15);
        assert!(g.is_symmetric(0.0));
        assert_eq!(markovian_rates(1.2, &c), ComplexMatrix2::zeros());
    }

    proptest::proptest! {
        #[test]
        fn cauchy_schwarz_holds_with_equality(w in 0.9001f64..1.0999, n1 in 1u32..8, n2 in 1u32..8, e1 in 0.0f64..1.0, e2 in 0.0f64..1.0) {
            let mut c = SystemConfig::symmetric(1.0, 0.05, e1, n1, n2, 1.0);
            c.xi2 = e2 * c.xi0;
            let j = SpectralDensityMatrix::new(&c).at(w);
            proptest::prop_assert!((j[0][1] - j[1][0]).abs() < 1e-18);
            proptest::prop_assert!(j[0][0] >= 0.0 && j[1][1] >= 0.0);
            let lhs = j[0][1] * j[0][1];
            let rhs = j[0][0] * j[1][1];
            proptest::prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300);
            proptest::prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }
    }
}
