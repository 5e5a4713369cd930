//! Executes scenarios: one directory per run, CSV per requested output and a
//! `manifest.json` sorted by config hash.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crowent::model::{Regime, SystemConfig};
use crowent::moments::{
    detect_esd_esb, entanglement_records, initial_moments, steady_state_index, write_records_csv, EntanglementRecord,
    DEFAULT_ESD_THRESHOLD,
};
use crowent::propagator::io::CSV_HEADER;
use crowent::propagator::{
    check_step, finite_chain_oracle, master_equation_coefficients, reflection_horizon, solve_volterra,
    weak_coupling_propagator, CoefficientSample, PropagatorTrajectory, VolterraOptions,
};
use crowent::spectral::{lamb_shift_matrix, markovian_rates, SpectralDensityMatrix};
use crowent::{ComplexMatrix2, MomentsError, PropagatorError};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::scenario::{MethodChoice, Output, RunSpec, Scenario, ScenarioError};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SPECTRA_CSV_HEADER: &str = "omega,J11,J22,J12";
pub const COEFFICIENTS_CSV_HEADER: &str = "t,regular,re_w11,im_w11,re_w12,im_w12,re_w21,im_w21,re_w22,im_w22,\
re_g11,im_g11,re_g12,im_g12,re_g21,im_g21,re_g22,im_g22";

/// Failure that prevents a scenario from running at all.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Failure of one method of one run; recorded in the manifest.
#[derive(Debug, Error)]
enum MethodError {
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Moments(#[from] MomentsError),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl MethodError {
    fn class(&self) -> &'static str {
        match self {
            MethodError::Propagator(e) => match e {
                PropagatorError::Invalid(_) => "invalid_config",
                PropagatorError::Spectral(_) => "spectral",
                PropagatorError::StepTooLarge { .. } => "step_too_large",
                PropagatorError::NumericalFailure { .. } => "numerical_failure",
                PropagatorError::Unsupported(_) => "unsupported",
                PropagatorError::BeyondHorizon { .. } => "beyond_horizon",
                PropagatorError::ChainTooShort { .. } => "chain_too_short",
            },
            MethodError::Moments(e) => match e {
                MomentsError::Unphysical(_) => "unphysical",
                MomentsError::Unsupported(_) => "unsupported",
                MomentsError::Invalid(_) => "invalid_config",
            },
            MethodError::Io { .. } => "io",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub dt: f64,
    pub tmax: f64,
    pub methods: Vec<MethodChoice>,
    pub outputs: Vec<Output>,
    pub stride: usize,
    pub chain_length: usize,
    pub kernel: &'static str,
    pub history: &'static str,
    pub sweep_mode: crate::scenario::SweepMode,
    pub sweep_axes: Vec<String>,
}

/// Markovian rates and Lamb shifts at the common cavity frequency.
#[derive(Clone, Debug, Serialize)]
pub struct MarkovSummary {
    pub omega_c: f64,
    pub gamma: [[f64; 2]; 2],
    pub lamb_shift: Option<[[f64; 2]; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub max_e_n: f64,
    pub xi0_t_at_max: f64,
    pub purity_at_max: f64,
    pub final_e_n: f64,
    pub final_purity: f64,
    pub final_n11: f64,
    pub final_n22: f64,
    /// `[death, birth]` pairs in units of `1/xi0`.
    pub esd_intervals: Vec<[f64; 2]>,
    pub xi0_t_steady: Option<f64>,
    pub max_singular_value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MethodResult {
    pub method: MethodChoice,
    pub status: &'static str,
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_class: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunOutcome {
    pub hash: String,
    pub label: String,
    pub directory: String,
    pub regime: Regime,
    pub config: SystemConfig,
    pub frame_frequency: f64,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub markov: Option<MarkovSummary>,
    pub files: Vec<String>,
    pub results: Vec<MethodResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunOutcome {
    pub fn failed(&self) -> bool {
        self.error.is_some() || self.results.iter().any(|r| r.status != "ok")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub settings: Settings,
    pub runs: Vec<RunOutcome>,
    pub failed_runs: usize,
}

/// Expands, runs every sweep point on a pool of `workers` threads, writes
/// per-run files under `out_dir` and then the manifest.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path, workers: usize) -> Result<Manifest, RunError> {
    let runs = scenario.expand()?;
    fs::create_dir_all(out_dir).map_err(|source| RunError::Io { path: out_dir.into(), source })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    let mut outcomes: Vec<RunOutcome> = pool.install(|| runs.par_iter().map(|spec| execute(spec, out_dir)).collect());
    outcomes.sort_by(|a, b| a.hash.cmp(&b.hash));
    let first = &runs[0];
    let manifest = Manifest {
        scenario: scenario.name.clone(),
        figure: scenario.figure.clone(),
        description: scenario.description.clone(),
        settings: Settings {
            dt: first.dt,
            tmax: first.tmax,
            methods: first.methods.clone(),
            outputs: first.outputs.clone(),
            stride: first.stride,
            chain_length: first.chain_length,
            kernel: "bessel",
            history: "fft",
            sweep_mode: scenario.sweep_mode,
            sweep_axes: scenario.sweep_axes().iter().map(|(k, _)| k.clone()).collect(),
        },
        failed_runs: outcomes.iter().filter(|o| o.failed()).count(),
        runs: outcomes,
    };
    let path = out_dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    text.push('\n');
    fs::write(&path, text).map_err(|source| RunError::Io { path, source })?;
    Ok(manifest)
}

/// Problems that would make a run fail, found without solving anything.
pub fn preflight(spec: &RunSpec) -> Vec<String> {
    let mut problems = Vec::new();
    if !spec.needs_dynamics() {
        return problems;
    }
    let frame = spec.frame_frequency();
    for method in &spec.methods {
        let issue = match method {
            MethodChoice::Exact => check_step(&spec.natural, spec.dt, frame).err().map(|e| e.to_string()),
            MethodChoice::Weak => spec
                .natural
                .common_frequency()
                .is_none()
                .then(|| "weak coupling needs equal cavity frequencies".to_string()),
            MethodChoice::Oracle => {
                let horizon = reflection_horizon(&spec.natural, spec.chain_length);
                let top = spec.natural.n1.max(spec.natural.n2) as usize;
                if spec.chain_length < 4 * top {
                    Some(format!("chain_length {} is below 4 * max site = {}", spec.chain_length, 4 * top))
                } else if spec.grid.end() >= horizon {
                    Some(format!(
                        "end time xi0 t = {} exceeds the chain horizon xi0 t = {:.1}",
                        spec.tmax,
                        horizon * spec.natural.xi0
                    ))
                } else {
                    None
                }
            }
        };
        if let Some(issue) = issue {
            problems.push(format!("{}: {issue}", method.as_str()));
        }
    }
    problems
}

/// `omega, J11, J22, J12` at `points` frequencies spread over the open band.
pub fn spectra_table(config: &SystemConfig, points: usize) -> Vec<[f64; 4]> {
    let density = SpectralDensityMatrix::new(config);
    let (lo, hi) = density.band();
    (0..points)
        .map(|j| {
            let omega = lo + (hi - lo) * (j as f64 + 0.5) / points as f64;
            let m = density.at(omega);
            [omega, m[0][0], m[1][1], m[0][1]]
        })
        .collect()
}

fn markov_summary(config: &SystemConfig) -> Option<MarkovSummary> {
    let omega_c = config.common_frequency()?;
    let real = |m: ComplexMatrix2| [[m[(0, 0)].re, m[(0, 1)].re], [m[(1, 0)].re, m[(1, 1)].re]];
    Some(MarkovSummary {
        omega_c,
        gamma: real(markovian_rates(omega_c, config)),
        lamb_shift: lamb_shift_matrix(omega_c, config).ok().map(real),
    })
}

fn execute(spec: &RunSpec, out_dir: &Path) -> RunOutcome {
    let directory = spec.short_hash().to_string();
    let mut outcome = RunOutcome {
        hash: spec.hash.clone(),
        label: spec.label.clone(),
        directory: directory.clone(),
        regime: spec.regime,
        config: spec.config,
        frame_frequency: spec.frame_frequency(),
        steps: spec.grid.n_steps,
        markov: markov_summary(&spec.natural),
        files: Vec::new(),
        results: Vec::new(),
        error: None,
    };
    let run_dir = out_dir.join(&directory);
    if let Err(e) = fs::create_dir_all(&run_dir) {
        outcome.error = Some(format!("cannot create {}: {e}", run_dir.display()));
        return outcome;
    }
    if spec.outputs.contains(&Output::Spectra) {
        let name = format!("{directory}/spectra.csv");
        match write_file(out_dir, &name, |w| write_spectra(&spectra_table(&spec.natural, spec.points), w)) {
            Ok(()) => outcome.files.push(name),
            Err(e) => outcome.error = Some(e.to_string()),
        }
    }
    if spec.needs_dynamics() {
        for &method in &spec.methods {
            let result = match run_method(spec, method, out_dir, &directory) {
                Ok((files, summary)) => {
                    MethodResult { method, status: "ok", files, summary: Some(summary), error_class: None, error: None }
                }
                Err(e) => MethodResult {
                    method,
                    status: "failed",
                    files: Vec::new(),
                    summary: None,
                    error_class: Some(e.class()),
                    error: Some(e.to_string()),
                },
            };
            outcome.results.push(result);
        }
    }
    outcome
}

fn solve(spec: &RunSpec, method: MethodChoice) -> Result<PropagatorTrajectory, PropagatorError> {
    let frame = spec.frame_frequency();
    match method {
        MethodChoice::Exact => {
            let options = VolterraOptions { frame_frequency: Some(frame), ..VolterraOptions::default() };
            solve_volterra(&spec.natural, &spec.grid, &options)
        }
        MethodChoice::Weak => Ok(weak_coupling_propagator(&spec.natural, &spec.grid, frame)?.in_frame(frame)),
        MethodChoice::Oracle => Ok(finite_chain_oracle(&spec.natural, &spec.grid, spec.chain_length)?.in_frame(frame)),
    }
}

fn run_method(
    spec: &RunSpec,
    method: MethodChoice,
    out_dir: &Path,
    directory: &str,
) -> Result<(Vec<String>, Summary), MethodError> {
    let traj = solve(spec, method)?;
    let records = entanglement_records(&traj, &initial_moments(spec.natural.r1, spec.natural.r2))?;
    let keep = |k: usize, len: usize| k % spec.stride == 0 || k + 1 == len;
    let mut files = Vec::new();
    for output in &spec.outputs {
        let name = format!("{directory}/{}_{}.csv", method.as_str(), output.as_str());
        match output {
            Output::Spectra => continue,
            Output::Entanglement => {
                let rows: Vec<EntanglementRecord> =
                    records.iter().enumerate().filter(|(k, _)| keep(*k, records.len())).map(|(_, r)| *r).collect();
                write_file(out_dir, &name, |w| write_records_csv(&rows, w))?;
            }
            Output::Propagator => write_file(out_dir, &name, |w| write_propagator(&traj, spec.stride, w))?,
            Output::Coefficients => {
                let coefficients = master_equation_coefficients(&traj);
                write_file(out_dir, &name, |w| {
                    write_coefficients(&coefficients.times, &coefficients.samples, spec.stride, w)
                })?;
            }
        }
        files.push(name);
    }
    Ok((files, summarize(spec, &traj, &records)))
}

fn summarize(spec: &RunSpec, traj: &PropagatorTrajectory, records: &[EntanglementRecord]) -> Summary {
    let xi0 = spec.natural.xi0;
    let best = records.iter().fold(&records[0], |a, b| if b.e_n > a.e_n { b } else { a });
    let last = records.last().expect("grid has samples");
    let gamma = markovian_rates(spec.frame_frequency(), &spec.natural);
    let gamma_max = gamma[(0, 0)].re.max(gamma[(1, 1)].re);
    let steady =
        (gamma_max > 0.0).then(|| steady_state_index(records, 10.0 / gamma_max)).flatten().map(|k| records[k].t * xi0);
    Summary {
        max_e_n: best.e_n,
        xi0_t_at_max: best.t * xi0,
        purity_at_max: best.purity,
        final_e_n: last.e_n,
        final_purity: last.purity,
        final_n11: last.n11,
        final_n22: last.n22,
        esd_intervals: detect_esd_esb(records, DEFAULT_ESD_THRESHOLD)
            .iter()
            .map(|iv| [iv.death * xi0, iv.birth * xi0])
            .collect(),
        xi0_t_steady: steady,
        max_singular_value: traj.max_singular_value(),
    }
}

fn write_file(
    out_dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<(), MethodError> {
    let path = out_dir.join(name);
    let io_err = |source| MethodError::Io { path: path.display().to_string(), source };
    let mut w = BufWriter::new(File::create(&path).map_err(io_err)?);
    body(&mut w).and_then(|()| w.flush()).map_err(io_err)
}

fn write_spectra(rows: &[[f64; 4]], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{SPECTRA_CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", row[0], row[1], row[2], row[3])?;
    }
    Ok(())
}

fn write_propagator(traj: &PropagatorTrajectory, stride: usize, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let len = traj.len();
    for (k, m) in traj.samples().iter().enumerate() {
        if k % stride != 0 && k + 1 != len {
            continue;
        }
        write!(out, "{:.16e}", traj.time(k))?;
        for z in m.entries() {
            write!(out, ",{:.16e},{:.16e}", z.re, z.im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn write_coefficients(
    times: &[f64],
    samples: &[CoefficientSample],
    stride: usize,
    mut out: impl Write,
) -> io::Result<()> {
    writeln!(out, "{COEFFICIENTS_CSV_HEADER}")?;
    let len = samples.len();
    for (k, (t, sample)) in times.iter().zip(samples).enumerate() {
        if k % stride != 0 && k + 1 != len {
            continue;
        }
        write!(out, "{t:.16e}")?;
        match sample {
            CoefficientSample::Regular { omega_ren, gamma } => {
                write!(out, ",1")?;
                for z in omega_ren.entries().iter().chain(gamma.entries().iter()) {
                    write!(out, ",{:.16e},{:.16e}", z.re, z.im)?;
                }
            }
            CoefficientSample::Singular { .. } => {
                write!(out, ",0")?;
                for _ in 0..16 {
                    write!(out, ",nan")?;
                }
            }
        }
        writeln!(out)?;
    }
    Ok(())
}
