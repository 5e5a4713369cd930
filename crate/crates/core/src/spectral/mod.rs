//! Spectral structure of the waveguide seen by the two cavities.
//!
//! Every band integral is written in the wavenumber variable `k` through
//! `ω = ω₀ − 2ξ₀ cos k`, which turns the inverse-square-root band edges into
//! a smooth integrand on `[0, π]`.

mod density;
mod kernel;
mod lamb;

pub use density::{
    coupling_profile, density_of_states, markovian_rates, spectral_density, spectral_density_in_band, wavenumber,
    SpectralDensityMatrix,
};
pub use kernel::{
    memory_kernel, memory_kernel_bessel, memory_kernel_quadrature, KernelBackend, KernelCache, MemoryKernelSample,
    DEFAULT_KERNEL_TOLERANCE,
};
pub use lamb::{lamb_shift, lamb_shift_matrix, lamb_shift_with_tolerance, DEFAULT_LAMB_TOLERANCE};
