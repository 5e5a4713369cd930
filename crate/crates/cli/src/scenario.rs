//! Flat TOML scenarios, `key=value` overrides and sweep expansion.
//!
//! Keys: `omega0`, `xi0`, `omega_c` (both cavities) or `omega_c1`/`omega_c2`,
//! `eta` (both couplings as `eta * xi0`) or `xi1`/`xi2`, `n1`, `n2`, `r` (both
//! squeezings) or `r1`/`r2`, `dt` (units of `1/omega0`), `tmax` (in units of
//! `1/xi0`, the figures' time axis), `method`, `outputs`, `stride`,
//! `chain_length`, `points`, `sweep_mode`, plus `name`, `description`,
//! `figure`. A `[sweep]` table maps any scalar key to a list of values.

use std::fmt;
use std::path::{Path, PathBuf};

use crowent::model::{Regime, Regimes, SystemConfig, TimeGrid};
use crowent::ValidationErrors;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use toml::{Table, Value};

const FLOAT_KEYS: [&str; 13] =
    ["omega0", "xi0", "omega_c", "omega_c1", "omega_c2", "eta", "xi1", "xi2", "r", "r1", "r2", "dt", "tmax"];
const META_KEYS: [&str; 3] = ["name", "description", "figure"];
/// Settings shared by every run of a sweep.
const SHARED_KEYS: [&str; 9] =
    ["dt", "tmax", "method", "outputs", "stride", "chain_length", "points", "sweep", "sweep_mode"];

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed scenario: {0}")]
    Parse(String),
    #[error("override {0:?} is not of the form key=value")]
    Override(String),
    #[error("{0:?} is neither a preset nor a readable config file")]
    UnknownTarget(String),
    #[error("sweep: {0}")]
    Sweep(String),
    #[error("run {label}: {source}")]
    Invalid { label: String, source: ValidationErrors },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Exact,
    Weak,
    Oracle,
}

impl MethodChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodChoice::Exact => "exact",
            MethodChoice::Weak => "weak",
            MethodChoice::Oracle => "oracle",
        }
    }

    /// Parses `exact`, `weak`, `oracle` or `all`.
    pub fn parse_list(s: &str) -> Option<Vec<MethodChoice>> {
        match s {
            "exact" => Some(vec![MethodChoice::Exact]),
            "weak" => Some(vec![MethodChoice::Weak]),
            "oracle" => Some(vec![MethodChoice::Oracle]),
            "all" => Some(vec![MethodChoice::Exact, MethodChoice::Weak, MethodChoice::Oracle]),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Spectra,
    Propagator,
    Entanglement,
    Coefficients,
}

impl Output {
    fn parse(s: &str) -> Option<Output> {
        match s {
            "spectra" => Some(Output::Spectra),
            "propagator" => Some(Output::Propagator),
            "entanglement" => Some(Output::Entanglement),
            "coefficients" => Some(Output::Coefficients),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Output::Spectra => "spectra",
            Output::Propagator => "propagator",
            Output::Entanglement => "entanglement",
            Output::Coefficients => "coefficients",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// Cartesian product of all axes.
    #[default]
    Product,
    /// Axes of equal length advanced together.
    Zip,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    omega0: Option<f64>,
    xi0: Option<f64>,
    omega_c: Option<f64>,
    omega_c1: Option<f64>,
    omega_c2: Option<f64>,
    eta: Option<f64>,
    xi1: Option<f64>,
    xi2: Option<f64>,
    n1: Option<u32>,
    n2: Option<u32>,
    r: Option<f64>,
    r1: Option<f64>,
    r2: Option<f64>,
    dt: Option<f64>,
    tmax: Option<f64>,
    method: Option<String>,
    outputs: Option<Vec<String>>,
    stride: Option<usize>,
    chain_length: Option<usize>,
    points: Option<usize>,
}

/// One fully resolved run of a scenario.
#[derive(Clone, Debug)]
pub struct RunSpec {
    /// Sweep coordinates, e.g. `eta=0.2,n2=5`, or `base`.
    pub label: String,
    /// Configuration as given, in the input frequency unit.
    pub config: SystemConfig,
    /// Same configuration with `omega0 = 1`.
    pub natural: SystemConfig,
    /// Grid in units of `1/omega0`.
    pub grid: TimeGrid,
    pub dt: f64,
    pub tmax: f64,
    pub regimes: Regimes,
    pub regime: Regime,
    pub methods: Vec<MethodChoice>,
    pub outputs: Vec<Output>,
    pub stride: usize,
    pub chain_length: usize,
    pub points: usize,
    /// SHA-256 of the canonical JSON of config and grid settings.
    pub hash: String,
}

impl RunSpec {
    pub fn short_hash(&self) -> &str {
        &self.hash[..16]
    }

    /// Rotating frame used for every propagator of this run.
    pub fn frame_frequency(&self) -> f64 {
        self.natural.common_frequency().unwrap_or(self.natural.omega0)
    }

    /// Whether any solver output was requested.
    pub fn needs_dynamics(&self) -> bool {
        self.outputs.iter().any(|o| *o != Output::Spectra)
    }
}

#[derive(Serialize)]
struct HashInput<'a> {
    config: &'a SystemConfig,
    dt: f64,
    tmax: f64,
}

/// A parsed scenario: scalar settings plus optional sweep axes.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: Option<String>,
    pub figure: Option<String>,
    table: Table,
    sweep: Vec<(String, Vec<Value>)>,
    pub sweep_mode: SweepMode,
}

impl Scenario {
    /// Loads a preset by name, or else a TOML file by path.
    pub fn load(target: &str) -> Result<Scenario, ScenarioError> {
        if let Some(table) = crate::presets::preset_table(target) {
            return Scenario::from_table(table);
        }
        let path = Path::new(target);
        if !path.is_file() {
            return Err(ScenarioError::UnknownTarget(target.into()));
        }
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Read { path: path.into(), source })?;
        let mut table: Table = text.parse().map_err(|e: toml::de::Error| ScenarioError::Parse(e.to_string()))?;
        if !table.contains_key("name") {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
            table.insert("name".into(), Value::String(stem.into()));
        }
        Scenario::from_table(table)
    }

    pub fn from_table(mut table: Table) -> Result<Scenario, ScenarioError> {
        let text = |table: &mut Table, key: &str| -> Result<Option<String>, ScenarioError> {
            match table.remove(key) {
                None => Ok(None),
                Some(Value::String(s)) => Ok(Some(s)),
                Some(other) => Err(ScenarioError::Parse(format!("{key} must be a string, got {other}"))),
            }
        };
        let name = text(&mut table, "name")?.unwrap_or_else(|| "scenario".into());
        let description = text(&mut table, "description")?;
        let figure = text(&mut table, "figure")?;
        let sweep_mode = match text(&mut table, "sweep_mode")?.as_deref() {
            None | Some("product") => SweepMode::Product,
            Some("zip") => SweepMode::Zip,
            Some(other) => {
                return Err(ScenarioError::Parse(format!("sweep_mode must be product or zip, got {other:?}")))
            }
        };
        let mut sweep = Vec::new();
        match table.remove("sweep") {
            None => {}
            Some(Value::Table(axes)) => {
                for (key, values) in axes {
                    sweep.push((key.clone(), axis_values(&key, values)?));
                }
            }
            Some(_) => return Err(ScenarioError::Parse("sweep must be a table of lists".into())),
        }
        let scenario = Scenario { name, description, figure, table, sweep, sweep_mode };
        scenario.expand()?;
        Ok(scenario)
    }

    /// Applies one `key=value` override. `sweep.<key>=[...]` sets a sweep
    /// axis; a scalar override of a swept key removes that axis.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ScenarioError> {
        let (key, raw) = assignment.split_once('=').ok_or_else(|| ScenarioError::Override(assignment.into()))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ScenarioError::Override(assignment.into()));
        }
        let value = parse_value(raw.trim());
        self.set(key, value)?;
        self.expand()?;
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: Value) -> Result<(), ScenarioError> {
        if let Some(axis) = key.strip_prefix("sweep.") {
            let values = axis_values(axis, value)?;
            match self.sweep.iter_mut().find(|(k, _)| k == axis) {
                Some(entry) => entry.1 = values,
                None => self.sweep.push((axis.into(), values)),
            }
            return Ok(());
        }
        let as_text = |v: Value| match v {
            Value::String(s) => Ok(s),
            other => Err(ScenarioError::Parse(format!("{key} must be a string, got {other}"))),
        };
        match key {
            "name" => self.name = as_text(value)?,
            "description" => self.description = Some(as_text(value)?),
            "figure" => self.figure = Some(as_text(value)?),
            "sweep_mode" => {
                self.sweep_mode = match as_text(value)?.as_str() {
                    "product" => SweepMode::Product,
                    "zip" => SweepMode::Zip,
                    other => {
                        return Err(ScenarioError::Parse(format!("sweep_mode must be product or zip, got {other:?}")))
                    }
                }
            }
            _ => {
                self.sweep.retain(|(k, _)| k != key);
                self.table.insert(key.into(), value);
            }
        }
        Ok(())
    }

    pub fn sweep_axes(&self) -> &[(String, Vec<Value>)] {
        &self.sweep
    }

    /// Every run of the scenario, validated, in sweep order.
    pub fn expand(&self) -> Result<Vec<RunSpec>, ScenarioError> {
        let points = self.points()?;
        let mut runs = Vec::with_capacity(points.len());
        for point in points {
            let mut table = self.table.clone();
            let mut label = Vec::new();
            for (key, value) in point {
                label.push(format!("{key}={value}"));
                table.insert(key, value);
            }
            let label = if label.is_empty() { "base".to_string() } else { label.join(",") };
            runs.push(resolve(table, label)?);
        }
        let mut hashes: Vec<&str> = runs.iter().map(|r| r.hash.as_str()).collect();
        hashes.sort_unstable();
        if hashes.windows(2).any(|w| w[0] == w[1]) {
            return Err(ScenarioError::Sweep("two sweep points resolve to the same configuration".into()));
        }
        Ok(runs)
    }

    fn points(&self) -> Result<Vec<Vec<(String, Value)>>, ScenarioError> {
        if self.sweep.is_empty() {
            return Ok(vec![Vec::new()]);
        }
        match self.sweep_mode {
            SweepMode::Zip => {
                let len = self.sweep[0].1.len();
                if self.sweep.iter().any(|(_, v)| v.len() != len) {
                    return Err(ScenarioError::Sweep("zip mode needs axes of equal length".into()));
                }
                Ok((0..len).map(|i| self.sweep.iter().map(|(k, v)| (k.clone(), v[i].clone())).collect()).collect())
            }
            SweepMode::Product => {
                let mut points: Vec<Vec<(String, Value)>> = vec![Vec::new()];
                for (key, values) in &self.sweep {
                    points = points
                        .into_iter()
                        .flat_map(|p| {
                            values.iter().map(move |v| {
                                let mut q = p.clone();
                                q.push((key.clone(), v.clone()));
                                q
                            })
                        })
                        .collect();
                }
                Ok(points)
            }
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if let Some(d) = &self.description {
            write!(f, ": {d}")?;
        }
        Ok(())
    }
}

fn axis_values(key: &str, value: Value) -> Result<Vec<Value>, ScenarioError> {
    if META_KEYS.contains(&key) || SHARED_KEYS.contains(&key) {
        return Err(ScenarioError::Sweep(format!("{key} cannot be swept")));
    }
    match value {
        Value::Array(values) if !values.is_empty() => Ok(values),
        _ => Err(ScenarioError::Sweep(format!("axis {key} must be a non-empty list"))),
    }
}

/// TOML literal if it parses as one, otherwise a bare string.
fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.into()))
}

fn resolve(mut table: Table, label: String) -> Result<RunSpec, ScenarioError> {
    for key in FLOAT_KEYS {
        if let Some(Value::Integer(i)) = table.get(key) {
            let f = *i as f64;
            table.insert(key.into(), Value::Float(f));
        }
    }
    let raw: Raw = Table::try_into(table).map_err(|e| ScenarioError::Parse(format!("run {label}: {e}")))?;
    let omega0 = raw.omega0.unwrap_or(1.0);
    let xi0 = raw.xi0.unwrap_or(0.05 * omega0);
    let omega_c = raw.omega_c.unwrap_or(omega0);
    let eta = raw.eta.unwrap_or(0.08);
    let r = raw.r.unwrap_or(1.0);
    let config = SystemConfig {
        omega0,
        xi0,
        omega_c1: raw.omega_c1.unwrap_or(omega_c),
        omega_c2: raw.omega_c2.unwrap_or(omega_c),
        xi1: raw.xi1.unwrap_or(eta * xi0),
        xi2: raw.xi2.unwrap_or(eta * xi0),
        n1: raw.n1.unwrap_or(1),
        n2: raw.n2.unwrap_or(5),
        r1: raw.r1.unwrap_or(r),
        r2: raw.r2.unwrap_or(r),
    };
    let invalid = |source: ValidationErrors| ScenarioError::Invalid { label: label.clone(), source };
    let regimes = config.validate().map_err(invalid)?;
    let (natural, _) = config.in_natural_units();
    let dt = raw.dt.unwrap_or(0.1);
    let tmax = raw.tmax.unwrap_or(100.0);
    let grid = TimeGrid::covering(dt, tmax / natural.xi0).map_err(|e| invalid(ValidationErrors(vec![e])))?;
    let methods = match raw.method.as_deref() {
        None => vec![MethodChoice::Exact],
        Some(m) => MethodChoice::parse_list(m)
            .ok_or_else(|| ScenarioError::Parse(format!("method must be exact, weak, oracle or all, got {m:?}")))?,
    };
    let mut outputs = Vec::new();
    for o in raw.outputs.unwrap_or_else(|| vec!["entanglement".into()]) {
        let parsed = Output::parse(&o).ok_or_else(|| {
            ScenarioError::Parse(format!("unknown output {o:?} (spectra, propagator, entanglement, coefficients)"))
        })?;
        if !outputs.contains(&parsed) {
            outputs.push(parsed);
        }
    }
    let positive = |key: &str, v: usize| {
        if v == 0 {
            Err(ScenarioError::Parse(format!("{key} must be at least 1")))
        } else {
            Ok(v)
        }
    };
    let stride = positive("stride", raw.stride.unwrap_or(1))?;
    let chain_length = positive("chain_length", raw.chain_length.unwrap_or(crowent::propagator::DEFAULT_CHAIN_LENGTH))?;
    let points = positive("points", raw.points.unwrap_or(801))?;
    let digest =
        Sha256::digest(serde_json::to_vec(&HashInput { config: &config, dt, tmax }).expect("config serialises"));
    Ok(RunSpec {
        regime: regimes.common().unwrap_or(regimes.first),
        label,
        config,
        natural,
        grid,
        dt,
        tmax,
        regimes,
        methods,
        outputs,
        stride,
        chain_length,
        points,
        hash: hex::encode(digest),
    })
}
