use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use crowent_cli::run::{preflight, run_scenario};
use crowent_cli::{list_presets, Scenario};

/// Exact entanglement dynamics of two nanocavities coupled through a
/// coupled-resonator waveguide.
#[derive(Parser)]
#[command(name = "crowent", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a TOML scenario file and write CSVs plus manifest.json.
    Run {
        /// Preset name (see `list`) or path to a TOML scenario.
        target: String,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: OutputDir,
        /// Concurrent sweep runs [default: available cores].
        #[arg(long)]
        workers: Option<usize>,
    },
    /// List presets.
    List,
    /// Write spectral-density tables and print Markovian rates and Lamb shifts.
    Spectra {
        target: String,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        output: OutputDir,
        /// Frequencies sampled across the band.
        #[arg(long, default_value_t = 801)]
        points: usize,
    },
    /// Parse, expand and check a scenario without solving it.
    Validate {
        target: String,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args)]
struct Overrides {
    /// Override a scenario key, e.g. `--set eta=0.2` or `--set sweep.n2=[5,9]`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// exact, weak, oracle or all.
    #[arg(long)]
    method: Option<String>,
    /// Time step in units of 1/omega0.
    #[arg(long)]
    dt: Option<f64>,
    /// End time in units of 1/xi0.
    #[arg(long)]
    tmax: Option<f64>,
}

#[derive(Args)]
struct OutputDir {
    #[arg(long, env = "CROWENT_OUT_DIR", default_value = "crowent-out")]
    out: PathBuf,
}

/// Configuration problems exit with 2, failed runs with 1.
enum Failure {
    Config(anyhow::Error),
    Run(anyhow::Error),
}

fn load(target: &str, overrides: &Overrides) -> Result<Scenario, Failure> {
    let mut scenario = Scenario::load(target).map_err(|e| Failure::Config(e.into()))?;
    let mut assignments = overrides.set.clone();
    if let Some(m) = &overrides.method {
        assignments.push(format!("method=\"{m}\""));
    }
    if let Some(dt) = overrides.dt {
        assignments.push(format!("dt={dt:?}"));
    }
    if let Some(t) = overrides.tmax {
        assignments.push(format!("tmax={t:?}"));
    }
    for a in &assignments {
        scenario.apply_override(a).with_context(|| format!("applying {a:?}")).map_err(Failure::Config)?;
    }
    Ok(scenario)
}

fn run(scenario: &Scenario, out: &Path, workers: Option<usize>) -> Result<(), Failure> {
    let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let manifest = run_scenario(scenario, out, workers).map_err(|e| Failure::Run(e.into()))?;
    for r in &manifest.runs {
        for m in &r.results {
            match (&m.summary, &m.error) {
                (Some(s), _) => println!(
                    "{}  {:<24} {:<6} max E_N {:.4} (xi0 t {:.1})  final E_N {:.4}  P {:.4}",
                    r.directory,
                    r.label,
                    m.method.as_str(),
                    s.max_e_n,
                    s.xi0_t_at_max,
                    s.final_e_n,
                    s.final_purity
                ),
                (None, e) => println!(
                    "{}  {:<24} {:<6} FAILED [{}] {}",
                    r.directory,
                    r.label,
                    m.method.as_str(),
                    m.error_class.unwrap_or("unknown"),
                    e.as_deref().unwrap_or("")
                ),
            }
        }
        if let Some(e) = &r.error {
            println!("{}  {:<24} FAILED {e}", r.directory, r.label);
        }
    }
    println!("wrote {}", out.join(crowent_cli::run::MANIFEST_FILE).display());
    if manifest.failed_runs > 0 {
        return Err(Failure::Run(anyhow::anyhow!("{} of {} runs failed", manifest.failed_runs, manifest.runs.len())));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::List => {
            println!(
                "{:<7} {:<12} {:<10} {:>7} {:>10} {:>5}  description",
                "name", "figure", "regime", "omega_c", "n2", "runs"
            );
            for p in list_presets() {
                let n2: Vec<String> = p.n2.iter().map(|n| n.to_string()).collect();
                println!(
                    "{:<7} {:<12} {:<10} {:>7} {:>10} {:>5}  {}",
                    p.name,
                    p.figure,
                    p.regime.as_str(),
                    p.omega_c,
                    n2.join(","),
                    p.runs,
                    p.description
                );
            }
            Ok(())
        }
        Command::Validate { target, overrides } => {
            let scenario = load(&target, &overrides)?;
            let runs = scenario.expand().map_err(|e| Failure::Config(e.into()))?;
            let mut bad = 0;
            for spec in &runs {
                let problems = preflight(spec);
                let status = if problems.is_empty() { "ok".to_string() } else { problems.join("; ") };
                if !problems.is_empty() {
                    bad += 1;
                }
                println!(
                    "{}  {:<24} {:<10} steps {:>8}  {status}",
                    spec.short_hash(),
                    spec.label,
                    spec.regime.as_str(),
                    spec.grid.n_steps
                );
            }
            if bad > 0 {
                return Err(Failure::Config(anyhow::anyhow!("{bad} of {} runs would fail", runs.len())));
            }
            Ok(())
        }
        Command::Spectra { target, overrides, output, points } => {
            let mut scenario = load(&target, &overrides)?;
            for a in ["outputs=[\"spectra\"]".to_string(), format!("points={points}")] {
                scenario.apply_override(&a).map_err(|e| Failure::Config(e.into()))?;
            }
            let manifest = run_scenario(&scenario, &output.out, 1).map_err(|e| Failure::Run(e.into()))?;
            for r in &manifest.runs {
                print!("{}  {:<24} {:<10}", r.directory, r.label, r.regime.as_str());
                if let Some(m) = &r.markov {
                    print!(
                        " gamma11 {:.4e} gamma22 {:.4e} gamma12 {:.4e}",
                        m.gamma[0][0], m.gamma[1][1], m.gamma[0][1]
                    );
                    if let Some(d) = m.lamb_shift {
                        print!("  dw11 {:.4e} dw22 {:.4e} dw12 {:.4e}", d[0][0], d[1][1], d[0][1]);
                    }
                }
                println!();
            }
            if manifest.failed_runs > 0 {
                return Err(Failure::Run(anyhow::anyhow!("{} runs failed", manifest.failed_runs)));
            }
            Ok(())
        }
        Command::Run { target, overrides, output, workers } => {
            let scenario = load(&target, &overrides)?;
            run(&scenario, &output.out, workers)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(2)
        }
    }
}
