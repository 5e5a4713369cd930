use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::SpectralError;
use crate::model::{Cavity, ComplexMatrix2, SystemConfig};
use crate::quadrature::integrate;
use crate::special::fill_bessel_j;

pub const DEFAULT_KERNEL_TOLERANCE: f64 = 1e-13;
const MAX_INTERVALS: usize = 20_000;

/// How memory-kernel values are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum KernelBackend {
    /// Closed form in Bessel functions.
    #[default]
    Bessel,
    /// Adaptive quadrature of the band integral to an absolute tolerance.
    Quadrature { tolerance: f64 },
}

/// `g(τ)` at one delay.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MemoryKernelSample {
    pub tau: f64,
    pub g: ComplexMatrix2,
}

fn prefactor(i: Cavity, j: Cavity, config: &SystemConfig) -> f64 {
    config.coupling(i) * config.coupling(j)
}

/// `i^m`
fn i_pow(m: u32) -> Complex64 {
    match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Bracket `i^{|a−b|} J_{|a−b|}(x) − i^{a+b} J_{a+b}(x)` given `J_0..` at `x`.
fn bessel_bracket(a: u32, b: u32, bessel: &[f64]) -> Complex64 {
    let diff = a.abs_diff(b);
    let sum = a + b;
    i_pow(diff) * bessel[diff as usize] - i_pow(sum) * bessel[sum as usize]
}

/// `g_ij(τ) = (2/π) ξ_i ξ_j ∫₀^π sin(n_i k) sin(n_j k) e^{−i(ω₀ − 2ξ₀ cos k)τ} dk`
/// by adaptive Gauss–Kronrod quadrature.
pub fn memory_kernel_quadrature(
    i: Cavity,
    j: Cavity,
    tau: f64,
    config: &SystemConfig,
    tolerance: f64,
) -> Result<Complex64, SpectralError> {
    let pre = FRAC_2_PI * prefactor(i, j, config);
    if pre == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (a, b) = (config.site(i) as f64, config.site(j) as f64);
    let x = 2.0 * config.xi0 * tau;
    // Enough initial panels to resolve the oscillation of e^{i x cos k}.
    let panels = 4 + (x.abs() / 2.0 + a + b) as usize;
    let breaks: Vec<f64> = (0..=panels).map(|m| PI * m as f64 / panels as f64).collect();
    let q = integrate(
        |k| Complex64::from_polar((a * k).sin() * (b * k).sin(), x * k.cos()),
        &breaks,
        tolerance / pre,
        MAX_INTERVALS.max(4 * panels),
    );
    let phase = Complex64::from_polar(1.0, -config.omega0 * tau);
    let value = phase * q.value * pre;
    if q.converged {
        Ok(value)
    } else {
        Err(SpectralError::NoConvergence { estimate: value.norm(), error: q.error * pre, tolerance })
    }
}

/// Closed form `ξ_iξ_j e^{−iω₀τ}[i^{|n_i−n_j|}J_{|n_i−n_j|}(2ξ₀τ) − i^{n_i+n_j}J_{n_i+n_j}(2ξ₀τ)]`.
pub fn memory_kernel_bessel(i: Cavity, j: Cavity, tau: f64, config: &SystemConfig) -> Complex64 {
    let (a, b) = (config.site(i), config.site(j));
    let mut bessel = vec![0.0; (a + b) as usize + 1];
    fill_bessel_j(2.0 * config.xi0 * tau, &mut bessel);
    Complex64::from_polar(prefactor(i, j, config), -config.omega0 * tau) * bessel_bracket(a, b, &bessel)
}

/// Full `g(τ)` matrix with the chosen backend.
pub fn memory_kernel(
    tau: f64,
    config: &SystemConfig,
    backend: KernelBackend,
) -> Result<MemoryKernelSample, SpectralError> {
    let g = kernel_matrix(tau, config, backend, config.omega0)?;
    Ok(MemoryKernelSample { tau, g: g * Complex64::from_polar(1.0, -config.omega0 * tau) })
}

/// `e^{iω₀τ} g(τ)` with the carrier removed analytically, times `e^{i(ω_f−ω₀)τ}`.
fn kernel_matrix(
    tau: f64,
    config: &SystemConfig,
    backend: KernelBackend,
    frame: f64,
) -> Result<ComplexMatrix2, SpectralError> {
    let shift = Complex64::from_polar(1.0, (frame - config.omega0) * tau);
    let mut m = ComplexMatrix2::zeros();
    match backend {
        KernelBackend::Bessel => {
            let top = 2 * config.n1.max(config.n2);
            let mut bessel = vec![0.0; top as usize + 1];
            fill_bessel_j(2.0 * config.xi0 * tau, &mut bessel);
            for i in Cavity::BOTH {
                for j in Cavity::BOTH {
                    m[(i.index(), j.index())] =
                        bessel_bracket(config.site(i), config.site(j), &bessel) * prefactor(i, j, config) * shift;
                }
            }
        }
        KernelBackend::Quadrature { tolerance } => {
            // Evaluate in a frame where ω₀ = 0 so the carrier is not integrated.
            let centred = SystemConfig { omega0: 0.0, ..*config };
            for (i, j) in
                [(Cavity::First, Cavity::First), (Cavity::First, Cavity::Second), (Cavity::Second, Cavity::Second)]
            {
                let v = memory_kernel_quadrature(i, j, tau, &centred, tolerance)? * shift;
                m[(i.index(), j.index())] = v;
                m[(j.index(), i.index())] = v;
            }
        }
    }
    Ok(m)
}

/// Rotating-frame kernel `g̃(mh) = e^{iω_f mh} g(mh)` for `m = 0..=n_steps`.
#[derive(Clone, Debug)]
pub struct KernelCache {
    dt: f64,
    frame_frequency: f64,
    values: Vec<ComplexMatrix2>,
}

impl KernelCache {
    pub fn build(
        config: &SystemConfig,
        dt: f64,
        n_steps: usize,
        frame_frequency: f64,
        backend: KernelBackend,
    ) -> Result<Self, SpectralError> {
        let values = (0..=n_steps)
            .map(|m| kernel_matrix(m as f64 * dt, config, backend, frame_frequency))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { dt, frame_frequency, values })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn frame_frequency(&self) -> f64 {
        self.frame_frequency
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `g̃_ij` at delay `step · dt`.
    pub fn get(&self, i: Cavity, j: Cavity, step: usize) -> Complex64 {
        self.values[step][(i.index(), j.index())]
    }

    pub fn matrix(&self, step: usize) -> &ComplexMatrix2 {
        &self.values[step]
    }

    pub fn as_slice(&self) -> &[ComplexMatrix2] {
        &self.values
    }
}
