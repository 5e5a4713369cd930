use serde::{Deserialize, Serialize};

use crate::error::{ValidationError, ValidationErrors};

/// Relative tolerance used to decide that a cavity sits exactly at band center.
pub const RESONANCE_TOLERANCE: f64 = 1e-12;

/// One of the two cavities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cavity {
    First,
    Second,
}

impl Cavity {
    pub const BOTH: [Cavity; 2] = [Cavity::First, Cavity::Second];

    /// Zero-based matrix index.
    pub const fn index(self) -> usize {
        match self {
            Cavity::First => 0,
            Cavity::Second => 1,
        }
    }
}

/// Where a cavity frequency sits relative to the waveguide band
/// `[omega0 - 2 xi0, omega0 + 2 xi0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// Cavity frequency equal to the band center.
    Resonant,
    /// `|omega_c - omega0| >= 2 xi0`.
    OutOfBand,
    /// Inside the band but off center.
    InBand,
}

impl Regime {
    pub fn classify(omega_c: f64, omega0: f64, xi0: f64) -> Regime {
        let detuning = (omega_c - omega0).abs();
        if detuning <= RESONANCE_TOLERANCE * omega0.abs().max(1.0) {
            Regime::Resonant
        } else if detuning >= 2.0 * xi0 * (1.0 - RESONANCE_TOLERANCE) {
            Regime::OutOfBand
        } else {
            Regime::InBand
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Resonant => "resonant",
            Regime::OutOfBand => "out-of-band",
            Regime::InBand => "in-band",
        }
    }
}

/// Regime of each cavity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regimes {
    pub first: Regime,
    pub second: Regime,
}

impl Regimes {
    /// The common regime when both cavities agree.
    pub fn common(&self) -> Option<Regime> {
        (self.first == self.second).then_some(self.first)
    }
}

/// Physical parameters of the two cavities and the waveguide.
///
/// All frequencies share one unit. [`SystemConfig::in_natural_units`] rescales
/// them so that `omega0 = 1`, which is the convention used by every solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// Frequency of each waveguide resonator (band center).
    pub omega0: f64,
    /// Nearest-neighbour hopping inside the waveguide.
    pub xi0: f64,
    pub omega_c1: f64,
    pub omega_c2: f64,
    /// Cavity–waveguide couplings.
    pub xi1: f64,
    pub xi2: f64,
    /// Attachment sites, counted from 1 at the closed end of the waveguide.
    pub n1: u32,
    pub n2: u32,
    /// Initial single-mode squeezing parameters.
    pub r1: f64,
    pub r2: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self::symmetric(1.0, 0.05, 0.08, 1, 5, 1.0)
    }
}

impl SystemConfig {
    /// Equal cavity frequencies, equal couplings `eta * xi0` and equal
    /// squeezing, in units where `omega0 = 1`.
    pub fn symmetric(omega_c: f64, xi0: f64, eta: f64, n1: u32, n2: u32, r: f64) -> Self {
        Self {
            omega0: 1.0,
            xi0,
            omega_c1: omega_c,
            omega_c2: omega_c,
            xi1: eta * xi0,
            xi2: eta * xi0,
            n1,
            n2,
            r1: r,
            r2: r,
        }
    }

    pub fn frequency(&self, cavity: Cavity) -> f64 {
        match cavity {
            Cavity::First => self.omega_c1,
            Cavity::Second => self.omega_c2,
        }
    }

    pub fn coupling(&self, cavity: Cavity) -> f64 {
        match cavity {
            Cavity::First => self.xi1,
            Cavity::Second => self.xi2,
        }
    }

    pub fn site(&self, cavity: Cavity) -> u32 {
        match cavity {
            Cavity::First => self.n1,
            Cavity::Second => self.n2,
        }
    }

    pub fn squeezing(&self, cavity: Cavity) -> f64 {
        match cavity {
            Cavity::First => self.r1,
            Cavity::Second => self.r2,
        }
    }

    /// Coupling of `cavity` relative to the waveguide hopping, `xi_i / xi0`.
    pub fn eta(&self, cavity: Cavity) -> f64 {
        self.coupling(cavity) / self.xi0
    }

    /// Lower and upper band edges.
    pub fn band(&self) -> (f64, f64) {
        (self.omega0 - 2.0 * self.xi0, self.omega0 + 2.0 * self.xi0)
    }

    /// Common cavity frequency, if both cavities share one.
    pub fn common_frequency(&self) -> Option<f64> {
        let scale = self.omega_c1.abs().max(self.omega_c2.abs()).max(1.0);
        ((self.omega_c1 - self.omega_c2).abs() <= 1e-14 * scale).then_some(self.omega_c1)
    }

    /// Checks every invariant and classifies each cavity frequency.
    pub fn validate(&self) -> Result<Regimes, ValidationErrors> {
        let mut errors = Vec::new();
        let fields = [
            ("omega0", self.omega0),
            ("xi0", self.xi0),
            ("omega_c1", self.omega_c1),
            ("omega_c2", self.omega_c2),
            ("xi1", self.xi1),
            ("xi2", self.xi2),
            ("r1", self.r1),
            ("r2", self.r2),
        ];
        for (field, value) in fields {
            if !value.is_finite() {
                errors.push(ValidationError::NonFinite { field });
            }
        }
        if self.xi0.is_finite() && self.xi0 <= 0.0 {
            errors.push(ValidationError::NonPositiveHopping { xi0: self.xi0 });
        }
        for (field, value) in [("omega0", self.omega0), ("omega_c1", self.omega_c1), ("omega_c2", self.omega_c2)] {
            if value.is_finite() && value <= 0.0 {
                errors.push(ValidationError::NonPositiveFrequency { field, value });
            }
        }
        for (field, value) in [("xi1", self.xi1), ("xi2", self.xi2)] {
            if value.is_finite() && value < 0.0 {
                errors.push(ValidationError::NegativeCoupling { field, value });
            }
        }
        for (field, value) in [("r1", self.r1), ("r2", self.r2)] {
            if value.is_finite() && value < 0.0 {
                errors.push(ValidationError::NegativeSqueezing { field, value });
            }
        }
        for (field, value) in [("n1", self.n1), ("n2", self.n2)] {
            if value == 0 {
                errors.push(ValidationError::InvalidSite { field, value });
            }
        }
        if self.n1 == self.n2 && self.n1 != 0 {
            errors.push(ValidationError::CoincidentSites { site: self.n1 });
        }
        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }
        Ok(Regimes {
            first: Regime::classify(self.omega_c1, self.omega0, self.xi0),
            second: Regime::classify(self.omega_c2, self.omega0, self.xi0),
        })
    }

    /// Copy of the configuration with every frequency divided by `omega0`,
    /// together with the factor that was divided out.
    pub fn in_natural_units(&self) -> (SystemConfig, f64) {
        let unit = self.omega0;
        let scaled = SystemConfig {
            omega0: 1.0,
            xi0: self.xi0 / unit,
            omega_c1: self.omega_c1 / unit,
            omega_c2: self.omega_c2 / unit,
            xi1: self.xi1 / unit,
            xi2: self.xi2 / unit,
            ..*self
        };
        (scaled, unit)
    }
}

/// Uniform time grid `t_k = t0 + k dt` for `k = 0..=n_steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, n_steps: usize) -> Result<Self, ValidationError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ValidationError::NonPositiveStep { dt });
        }
        if n_steps == 0 {
            return Err(ValidationError::EmptyGrid);
        }
        Ok(Self { t0: 0.0, dt, n_steps })
    }

    /// Grid reaching at least `t_max` with step `dt`.
    pub fn covering(dt: f64, t_max: f64) -> Result<Self, ValidationError> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(ValidationError::EmptyGrid);
        }
        let steps = (t_max / dt - 1e-9).ceil().max(1.0);
        Self::new(dt, steps as usize)
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.time(self.n_steps)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_steps).map(|k| self.time(k))
    }

    /// Grid expressed in units where frequencies were divided by `unit`.
    pub fn in_units_of(&self, unit: f64) -> TimeGrid {
        TimeGrid { t0: self.t0 * unit, dt: self.dt * unit, n_steps: self.n_steps }
    }
}

/// Validates a configuration and grid together, collecting every violation.
pub fn validate_run(config: &SystemConfig, grid: &TimeGrid) -> Result<Regimes, ValidationErrors> {
    let grid_errors = match TimeGrid::new(grid.dt, grid.n_steps) {
        Ok(_) => Vec::new(),
        Err(e) => vec![e],
    };
    match (config.validate(), grid_errors.is_empty()) {
        (Ok(regimes), true) => Ok(regimes),
        (Ok(_), false) => Err(ValidationErrors(grid_errors)),
        (Err(mut errors), _) => {
            errors.0.extend(grid_errors);
            Err(errors)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes_follow_band_position() {
        let xi0 = 0.05;
        assert_eq!(Regime::classify(1.0, 1.0, xi0), Regime::Resonant);
        assert_eq!(Regime::classify(1.2, 1.0, xi0), Regime::OutOfBand);
        assert_eq!(Regime::classify(1.03, 1.0, xi0), Regime::InBand);
        assert_eq!(Regime::classify(1.06, 1.0, xi0), Regime::InBand);
        assert_eq!(Regime::classify(0.9, 1.0, xi0), Regime::OutOfBand);
    }

    #[test]
    fn validate_reports_each_violation_by_name() {
        let cfg = SystemConfig { xi0: 0.0, ..SystemConfig::default() };
        let errs = cfg.validate().unwrap_err();
        assert!(errs.0.iter().any(|e| matches!(e, ValidationError::NonPositiveHopping { .. })));

        let mut cfg = SystemConfig::default();
        cfg.n2 = cfg.n1;
        let errs = cfg.validate().unwrap_err();
        assert_eq!(errs.0, vec![ValidationError::CoincidentSites { site: 1 }]);

        let grid = TimeGrid { t0: 0.0, dt: 0.5, n_steps: 0 };
        let errs = validate_run(&SystemConfig::default(), &grid).unwrap_err();
        assert_eq!(errs.0, vec![ValidationError::EmptyGrid]);
    }

    #[test]
    fn validate_collects_multiple_errors() {
        let cfg = SystemConfig { xi0: -1.0, n1: 0, r2: -0.5, ..SystemConfig::default() };
        let errs = cfg.validate().unwrap_err();
        assert_eq!(errs.0.len(), 3);
    }

    #[test]
    fn natural_units_rescale_frequencies_only() {
        let cfg = SystemConfig {
            omega0: 2.0,
            xi0: 0.1,
            omega_c1: 2.4,
            omega_c2: 2.0,
            xi1: 0.02,
            xi2: 0.04,
            n1: 1,
            n2: 3,
            r1: 0.5,
            r2: 0.7,
        };
        let (nat, unit) = cfg.in_natural_units();
        assert_eq!(unit, 2.0);
        assert_eq!(nat.omega0, 1.0);
        assert!((nat.omega_c1 - 1.2).abs() < 1e-15);
        assert_eq!(nat.r2, 0.7);
        assert_eq!(nat.n2, 3);
        assert_eq!(cfg.validate().unwrap(), nat.validate().unwrap());
        assert!((nat.eta(Cavity::Second) - cfg.eta(Cavity::Second)).abs() < 1e-15);
    }

    #[test]
    fn grid_samples_are_exact_multiples() {
        let g = TimeGrid::new(0.25, 8).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.time(8), 2.0);
        let c = TimeGrid::covering(0.3, 1.0).unwrap();
        assert_eq!(c.n_steps, 4);
        assert!(TimeGrid::new(0.0, 3).is_err());
    }
}
