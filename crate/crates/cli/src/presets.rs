//! Bundled experiment configs, each with a reduced desk-sized variant.

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub text: &'static str,
}

impl Preset {
    pub fn config(&self) -> Result<ExperimentConfig, CliError> {
        ExperimentConfig::parse(self.text).map_err(|e| CliError::Config(format!("preset {}: {e}", self.name)))
    }
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "fig1", text: include_str!("../presets/fig1.toml") },
    Preset { name: "fig1-small", text: include_str!("../presets/fig1-small.toml") },
    Preset { name: "fig2-g070", text: include_str!("../presets/fig2-g070.toml") },
    Preset { name: "fig2-g070-small", text: include_str!("../presets/fig2-g070-small.toml") },
    Preset { name: "fig2-g075", text: include_str!("../presets/fig2-g075.toml") },
    Preset { name: "fig2-g075-small", text: include_str!("../presets/fig2-g075-small.toml") },
    Preset { name: "fig2-g090", text: include_str!("../presets/fig2-g090.toml") },
    Preset { name: "fig2-g090-small", text: include_str!("../presets/fig2-g090-small.toml") },
    Preset { name: "fig3", text: include_str!("../presets/fig3.toml") },
    Preset { name: "fig3-small", text: include_str!("../presets/fig3-small.toml") },
    Preset { name: "fig4", text: include_str!("../presets/fig4.toml") },
    Preset { name: "fig4-small", text: include_str!("../presets/fig4-small.toml") },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
