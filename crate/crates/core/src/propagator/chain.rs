use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::PropagatorError;
use crate::model::{validate_run, ComplexMatrix2, SystemConfig, TimeGrid};

use super::trajectory::{Method, PropagatorTrajectory};

pub const DEFAULT_CHAIN_LENGTH: usize = 400;
/// Fraction of the round-trip time of the fastest wavefront that may be used.
pub const HORIZON_GUARD: f64 = 0.8;

/// Reflection-free time window `guard · N / (2ξ₀)` of an `N`-site chain.
pub fn reflection_horizon(config: &SystemConfig, length: usize) -> f64 {
    HORIZON_GUARD * length as f64 / (2.0 * config.xi0)
}

/// Propagating function of a finite chain of `length` waveguide resonators,
/// from exact diagonalisation of the single-excitation Hamiltonian.
///
/// The Hamiltonian has cavity energies `ω₁, ω₂`, resonator energies `ω₀`,
/// hopping `−ξ₀` along the chain and couplings `+ξ_i` between cavity `i` and
/// site `n_i`. The returned samples rotate at `ω₀`.
pub fn finite_chain_oracle(
    config: &SystemConfig,
    grid: &TimeGrid,
    length: usize,
) -> Result<PropagatorTrajectory, PropagatorError> {
    validate_run(config, grid)?;
    let top = config.n1.max(config.n2);
    let required = 4 * top as usize;
    if length < required {
        return Err(PropagatorError::ChainTooShort { length, site: top, required });
    }
    let horizon = reflection_horizon(config, length);
    if grid.end() >= horizon {
        return Err(PropagatorError::BeyondHorizon { t_max: grid.end(), horizon });
    }
    let frame = config.omega0;
    // Energies are measured from ω₀ so the phases stay small.
    let dim = length + 2;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    h[(0, 0)] = config.omega_c1 - frame;
    h[(1, 1)] = config.omega_c2 - frame;
    for s in 0..length - 1 {
        h[(s + 2, s + 3)] = -config.xi0;
        h[(s + 3, s + 2)] = -config.xi0;
    }
    for (cavity, site, xi) in [(0, config.n1, config.xi1), (1, config.n2, config.xi2)] {
        let idx = site as usize + 1;
        h[(cavity, idx)] = xi;
        h[(idx, cavity)] = xi;
    }
    let eig = SymmetricEigen::new(h);
    let u = &eig.eigenvectors;
    let energies = &eig.eigenvalues;
    let weights: Vec<[f64; 4]> = (0..dim)
        .map(|m| [u[(0, m)] * u[(0, m)], u[(0, m)] * u[(1, m)], u[(1, m)] * u[(0, m)], u[(1, m)] * u[(1, m)]])
        .collect();

    let samples = grid
        .times()
        .map(|t| {
            let mut acc = [Complex64::new(0.0, 0.0); 4];
            for (m, w) in weights.iter().enumerate() {
                let phase = Complex64::from_polar(1.0, -energies[m] * t);
                for e in 0..4 {
                    acc[e] += phase * w[e];
                }
            }
            ComplexMatrix2::new(acc[0], acc[1], acc[2], acc[3])
        })
        .collect();
    Ok(PropagatorTrajectory::new(*config, *grid, frame, Method::FiniteChain, samples))
}
