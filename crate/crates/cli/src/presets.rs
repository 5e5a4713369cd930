//! Built-in scenarios, one per figure, stored as TOML in the same flat format
//! accepted from config files.

use crowent::model::{Regime, SystemConfig};
use toml::Table;

use crate::scenario::Scenario;

const PRESETS: [(&str, &str); 8] = [
    ("fig2", include_str!("presets/fig2.toml")),
    ("fig3", include_str!("presets/fig3.toml")),
    ("fig4", include_str!("presets/fig4.toml")),
    ("fig5", include_str!("presets/fig5.toml")),
    ("fig6a", include_str!("presets/fig6a.toml")),
    ("fig6c", include_str!("presets/fig6c.toml")),
    ("fig7", include_str!("presets/fig7.toml")),
    ("fig8", include_str!("presets/fig8.toml")),
];

/// One line of the preset table.
#[derive(Clone, Debug)]
pub struct PresetInfo {
    pub name: &'static str,
    pub figure: String,
    pub description: String,
    pub regime: Regime,
    pub omega_c: f64,
    pub n2: Vec<u32>,
    pub runs: usize,
}

/// Raw table of a preset, or `None` for an unknown name.
pub fn preset_table(name: &str) -> Option<Table> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(n, src)| {
        let mut table: Table = src.parse().unwrap_or_else(|e| panic!("preset {n} is malformed: {e}"));
        table.insert("name".into(), toml::Value::String((*n).into()));
        table
    })
}

pub fn preset(name: &str) -> Option<Scenario> {
    preset_table(name).map(|t| Scenario::from_table(t).expect("built-in presets are valid"))
}

/// Every preset in a stable order.
pub fn list_presets() -> Vec<PresetInfo> {
    PRESETS
        .iter()
        .map(|(name, _)| {
            let scenario = preset(name).expect("built-in preset");
            let runs = scenario.expand().expect("built-in presets expand");
            let first: &SystemConfig = &runs[0].config;
            let mut n2: Vec<u32> = runs.iter().map(|r| r.config.n2).collect();
            n2.sort_unstable();
            n2.dedup();
            PresetInfo {
                name,
                figure: scenario.figure.clone().unwrap_or_default(),
                description: scenario.description.clone().unwrap_or_default(),
                regime: runs[0].regime,
                omega_c: first.omega_c1 / first.omega0,
                n2,
                runs: runs.len(),
            }
        })
        .collect()
}
