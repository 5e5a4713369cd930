//! Scenario presets, config parsing, sweep expansion and output emission for
//! the `crowent` command-line tool.

pub mod presets;
pub mod run;
pub mod scenario;

pub use presets::{list_presets, preset, PresetInfo};
pub use run::{preflight, run_scenario, spectra_table, Manifest, RunError, RunOutcome};
pub use scenario::{MethodChoice, Output, RunSpec, Scenario, ScenarioError, SweepMode};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
