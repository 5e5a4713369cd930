use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::PropagatorError;
use crate::model::{validate_run, ComplexMatrix2, SystemConfig, TimeGrid};
use crate::spectral::{KernelBackend, KernelCache};

use super::trajectory::{Method, PropagatorTrajectory};

/// Upper bound on `dt` times the fastest scale of the rotating-frame equation.
pub const STEP_LIMIT: f64 = 0.1;
const DIRECT_BLOCK_MAX: usize = 32;
const CACHED_LEVEL_MAX: usize = 1 << 16;

/// Evaluation of the history sum `Σ_k g̃(t_n − t_k) μ̃(t_k)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HistorySum {
    /// Plain `O(n²)` summation.
    Direct,
    /// Blocked FFT convolution, `O(n log² n)`.
    #[default]
    Fft,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolterraOptions {
    pub backend: KernelBackend,
    pub history: HistorySum,
    /// Rotation frequency `ω_f`; `None` means the band center `ω₀`.
    pub frame_frequency: Option<f64>,
}

impl Default for VolterraOptions {
    fn default() -> Self {
        Self { backend: KernelBackend::Bessel, history: HistorySum::Fft, frame_frequency: None }
    }
}

impl VolterraOptions {
    /// Options using the quadrature kernel backend at `tolerance`.
    pub fn with_quadrature(tolerance: f64) -> Self {
        Self { backend: KernelBackend::Quadrature { tolerance }, ..Self::default() }
    }
}

/// Checks `dt · max(|ω_i − ω_f|, ξ₀, ξ_i) < STEP_LIMIT`.
pub fn check_step(config: &SystemConfig, dt: f64, frame_frequency: f64) -> Result<(), PropagatorError> {
    let scales = [
        ("|omega_c1 - omega_f|", (config.omega_c1 - frame_frequency).abs()),
        ("|omega_c2 - omega_f|", (config.omega_c2 - frame_frequency).abs()),
        ("xi0", config.xi0),
        ("xi1", config.xi1),
        ("xi2", config.xi2),
    ];
    let (scale, value) = scales.into_iter().fold(("xi0", 0.0), |best, s| if s.1 > best.1 { s } else { best });
    let product = dt * value;
    if product < STEP_LIMIT {
        Ok(())
    } else {
        Err(PropagatorError::StepTooLarge { dt, scale, product, limit: STEP_LIMIT })
    }
}

/// Exact propagating function from the integrodifferential equation
/// `dμ̃/dt = −i(ω̄ − ω_f)μ̃ − ∫₀ᵗ g̃(t−τ) μ̃(τ) dτ`, `μ̃(0) = I`.
///
/// The diagonal detuning is propagated exactly through
/// `μ̃_{n+1} = e^{−iΔh} μ̃_n − ∫ e^{−iΔ(t_{n+1}−s)} I(s) ds`, and both that
/// step integral and the memory integral `I` use the trapezoidal rule. Each
/// step is an implicit 2×2 linear solve; the scheme is second order in `dt`.
pub fn solve_volterra(
    config: &SystemConfig,
    grid: &TimeGrid,
    options: &VolterraOptions,
) -> Result<PropagatorTrajectory, PropagatorError> {
    run(config, grid, options, &[])
}

/// Extends `previous` to the longer `grid`, reusing its samples.
///
/// The result agrees with an uninterrupted [`solve_volterra`] run to
/// rounding; the blocked history sum depends on the grid length only through
/// the order of floating-point operations.
pub fn resume_volterra(
    previous: &PropagatorTrajectory,
    grid: &TimeGrid,
    options: &VolterraOptions,
) -> Result<PropagatorTrajectory, PropagatorError> {
    let frame = options.frame_frequency.unwrap_or(previous.config().omega0);
    let compatible = previous.method() == Method::Volterra
        && previous.grid().dt == grid.dt
        && previous.grid().t0 == grid.t0
        && previous.grid().n_steps <= grid.n_steps
        && previous.frame_frequency() == frame;
    if !compatible {
        return Err(PropagatorError::Unsupported(
            "resume needs a Volterra trajectory with the same step, start and frame".into(),
        ));
    }
    run(previous.config(), grid, options, previous.samples())
}

fn run(
    config: &SystemConfig,
    grid: &TimeGrid,
    options: &VolterraOptions,
    prefix: &[ComplexMatrix2],
) -> Result<PropagatorTrajectory, PropagatorError> {
    validate_run(config, grid)?;
    let frame = options.frame_frequency.unwrap_or(config.omega0);
    let h = grid.dt;
    check_step(config, h, frame)?;
    let n_steps = grid.n_steps;
    let cache = KernelCache::build(config, h, n_steps, frame, options.backend)?;
    let kernel = cache.as_slice();

    let rotate = ComplexMatrix2::diag(
        Complex64::from_polar(1.0, -(config.omega_c1 - frame) * h),
        Complex64::from_polar(1.0, -(config.omega_c2 - frame) * h),
    );
    let g0 = kernel[0];
    let lhs = ComplexMatrix2::identity() + g0 * (h * h / 4.0);
    let lhs_inv = lhs.inverse().ok_or(PropagatorError::NumericalFailure { index: 1, last_good: 0 })?;

    let mut history = History::new(kernel, options.history);
    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut mu = ComplexMatrix2::identity();
    samples.push(mu);
    history.push(mu * 0.5);
    // Memory integral I_n = h C_n + (h/2) G_0 μ_n, with I_0 = 0.
    let mut memory = ComplexMatrix2::zeros();

    for n in 0..n_steps {
        let conv = history.sum(n + 1);
        let next = match prefix.get(n + 1) {
            Some(saved) => *saved,
            None => lhs_inv * (rotate * (mu - memory * (h / 2.0)) - conv * (h * h / 2.0)),
        };
        if !next.is_finite() {
            return Err(PropagatorError::NumericalFailure { index: n + 1, last_good: n });
        }
        memory = conv * h + g0 * next * (h / 2.0);
        mu = next;
        samples.push(mu);
        history.push(mu);
    }
    Ok(PropagatorTrajectory::new(*config, *grid, frame, Method::Volterra, samples))
}

/// Online evaluation of `C_j = Σ_{k<j} G_{j−k} a_k`.
///
/// In FFT mode every aligned block of `B = 2^p` history entries is folded
/// against kernel lags `[B, 2B)` as soon as the block is complete. Each pair
/// `(k, j)` is covered by exactly one level, and a block finishing at index
/// `s + B` first contributes to `C_{s+B}`, which is needed next.
struct History<'a> {
    kernel: &'a [ComplexMatrix2],
    mode: HistorySum,
    a: Vec<ComplexMatrix2>,
    acc: Vec<ComplexMatrix2>,
    planner: FftPlanner<f64>,
    levels: Vec<Option<[Vec<Complex64>; 3]>>,
}

impl<'a> History<'a> {
    fn new(kernel: &'a [ComplexMatrix2], mode: HistorySum) -> Self {
        let n = kernel.len();
        let acc = match mode {
            HistorySum::Direct => Vec::new(),
            HistorySum::Fft => vec![ComplexMatrix2::zeros(); n],
        };
        Self { kernel, mode, a: Vec::with_capacity(n), acc, planner: FftPlanner::new(), levels: Vec::new() }
    }

    fn sum(&self, j: usize) -> ComplexMatrix2 {
        match self.mode {
            HistorySum::Direct => {
                let mut s = ComplexMatrix2::zeros();
                for (k, a) in self.a[..j].iter().enumerate() {
                    s += self.kernel[j - k] * *a;
                }
                s
            }
            HistorySum::Fft => self.acc[j],
        }
    }

    fn push(&mut self, value: ComplexMatrix2) {
        self.a.push(value);
        if self.mode == HistorySum::Direct {
            return;
        }
        let count = self.a.len();
        let mut level = 0;
        while count % (1 << level) == 0 {
            let b = 1 << level;
            self.fold_block(count - b, b, level);
            level += 1;
        }
    }

    fn fold_block(&mut self, start: usize, b: usize, level: usize) {
        let last = self.kernel.len() - 1;
        if start + b > last {
            return;
        }
        if b <= DIRECT_BLOCK_MAX {
            for k in start..start + b {
                let a = self.a[k];
                for lag in b..(2 * b).min(last - k + 1) {
                    self.acc[k + lag] += self.kernel[lag] * a;
                }
            }
            return;
        }
        let size = 2 * b;
        let forward = self.planner.plan_fft_forward(size);
        let inverse = self.planner.plan_fft_inverse(size);
        if self.levels.len() <= level {
            self.levels.resize_with(level + 1, || None);
        }
        let spectra = match self.levels[level].take() {
            Some(s) => s,
            None => kernel_spectra(self.kernel, b, &forward),
        };

        let mut blocks: [Vec<Complex64>; 4] = std::array::from_fn(|e| {
            let mut v = vec![Complex64::new(0.0, 0.0); size];
            for (q, a) in self.a[start..start + b].iter().enumerate() {
                v[q] = a[(e / 2, e % 2)];
            }
            forward.process(&mut v);
            v
        });
        let [g11, g12, g22] = &spectra;
        let [a11, a12, a21, a22] = &mut blocks;
        let mut out: [Vec<Complex64>; 4] = std::array::from_fn(|_| Vec::with_capacity(size));
        for f in 0..size {
            out[0].push(g11[f] * a11[f] + g12[f] * a21[f]);
            out[1].push(g11[f] * a12[f] + g12[f] * a22[f]);
            out[2].push(g12[f] * a11[f] + g22[f] * a21[f]);
            out[3].push(g12[f] * a12[f] + g22[f] * a22[f]);
        }
        let scale = 1.0 / size as f64;
        for (e, v) in out.iter_mut().enumerate() {
            inverse.process(v);
            let first = start + b;
            for (q, c) in v.iter().take((2 * b - 1).min(last + 1 - first)).enumerate() {
                self.acc[first + q][(e / 2, e % 2)] += c * scale;
            }
        }
        if b <= CACHED_LEVEL_MAX {
            self.levels[level] = Some(spectra);
        }
    }
}

/// Transforms of `G_11, G_12, G_22` over lags `[b, 2b)`, zero-padded to `2b`.
fn kernel_spectra(kernel: &[ComplexMatrix2], b: usize, forward: &Arc<dyn Fft<f64>>) -> [Vec<Complex64>; 3] {
    let entries = [(0, 0), (0, 1), (1, 1)];
    std::array::from_fn(|e| {
        let (r, c) = entries[e];
        let mut v = vec![Complex64::new(0.0, 0.0); 2 * b];
        for (q, g) in kernel.iter().skip(b).take(b).enumerate() {
            v[q] = g[(r, c)];
        }
        forward.process(&mut v);
        v
    })
}
