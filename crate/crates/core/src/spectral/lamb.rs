use std::f64::consts::PI;

use crate::error::SpectralError;
use crate::model::{Cavity, ComplexMatrix2, SystemConfig};
use crate::quadrature::integrate_real;

use super::density::wavenumber;

/// Default absolute tolerance on `δω`.
pub const DEFAULT_LAMB_TOLERANCE: f64 = 1e-16;
const MAX_INTERVALS: usize = 4000;

/// `(cos mk − cos mk_c)/(cos k_c − cos k)` written without cancellation.
fn subtracted_ratio(m: u32, k: f64, kc: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let m = m as f64;
    let s = 0.5 * (k + kc);
    let d = 0.5 * (k - kc);
    let dirichlet = if d == 0.0 { m } else { (m * d).sin() / d.sin() };
    -(m * s).sin() * dirichlet / s.sin()
}

/// `δω_ij(ω_c) = P∫ dω/2π J_ij(ω)/(ω − ω_c)` with the default tolerance.
pub fn lamb_shift(i: Cavity, j: Cavity, omega_c: f64, config: &SystemConfig) -> Result<f64, SpectralError> {
    lamb_shift_with_tolerance(i, j, omega_c, config, DEFAULT_LAMB_TOLERANCE)
}

/// Lamb shift to an absolute tolerance.
///
/// In band the singular part `J_ij(ω_c)/(ω − ω_c)` is subtracted; its
/// principal value over the band vanishes identically, and the remainder is
/// a regular integrand in `k`.
pub fn lamb_shift_with_tolerance(
    i: Cavity,
    j: Cavity,
    omega_c: f64,
    config: &SystemConfig,
    tolerance: f64,
) -> Result<f64, SpectralError> {
    // δω = (2/π) ξ_i ξ_j / (2ξ₀) · PV∫₀^π sin(ak) sin(bk) / (x_c − cos k) dk
    let pre = 2.0 / PI * config.coupling(i) * config.coupling(j) / (2.0 * config.xi0);
    if pre == 0.0 {
        return Ok(0.0);
    }
    let (a, b) = (config.site(i), config.site(j));
    let panels = 2 + (a + b) as usize;
    let tol = tolerance / pre;
    match wavenumber(omega_c, config) {
        Ok(kc) => {
            let mut breaks: Vec<f64> = (0..=panels).map(|m| PI * m as f64 / panels as f64).collect();
            breaks.push(kc);
            breaks.sort_by(f64::total_cmp);
            let (diff, sum) = (a.abs_diff(b), a + b);
            let q = integrate_real(
                |k| 0.5 * (subtracted_ratio(diff, k, kc) - subtracted_ratio(sum, k, kc)),
                &breaks,
                tol,
                MAX_INTERVALS,
            );
            if q.converged {
                Ok(pre * q.value.re)
            } else {
                Err(SpectralError::PrincipalValue {
                    estimate: pre * q.value.re,
                    error: pre * q.error,
                    intervals: q.intervals,
                })
            }
        }
        Err(_) => {
            let xc = (config.omega0 - omega_c) / (2.0 * config.xi0);
            let (a, b) = (a as f64, b as f64);
            // Cluster panels towards the edge nearest the pole.
            let mut breaks: Vec<f64> = (0..=8 * panels)
                .map(|m| {
                    let u = m as f64 / (8 * panels) as f64;
                    let v = u * u;
                    if xc > 0.0 {
                        PI * v
                    } else {
                        PI * (1.0 - v)
                    }
                })
                .collect();
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            let q = integrate_real(|k| (a * k).sin() * (b * k).sin() / (xc - k.cos()), &breaks, tol, MAX_INTERVALS);
            if q.converged {
                Ok(pre * q.value.re)
            } else {
                Err(SpectralError::NoConvergence { estimate: pre * q.value.re, error: pre * q.error, tolerance })
            }
        }
    }
}

/// Symmetric matrix of `δω_ij(ω_c)`.
pub fn lamb_shift_matrix(omega_c: f64, config: &SystemConfig) -> Result<ComplexMatrix2, SpectralError> {
    let d11 = lamb_shift(Cavity::First, Cavity::First, omega_c, config)?;
    let d12 = lamb_shift(Cavity::First, Cavity::Second, omega_c, config)?;
    let d22 = lamb_shift(Cavity::Second, Cavity::Second, omega_c, config)?;
    Ok(ComplexMatrix2::from_real([[d11, d12], [d12, d22]]))
}
