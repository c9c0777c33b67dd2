//! Experiment configuration: a TOML document wrapping the simulation
//! parameters, sweep grids, solver settings, and output location. Unknown
//! keys are rejected.

use serde::{Deserialize, Serialize};
use vmac_sim::config::{Policy, Scheme, SimConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub sim: SimConfig,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Budget grid in Mbps per cell (multicell) or total per cluster
    /// (hetnet); empty means the single budget from the sim section.
    pub budgets_mbps_per_cell: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub policies: Vec<Policy>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            budgets_mbps_per_cell: Vec::new(),
            schemes: vec![Scheme::Baseline, Scheme::Su],
            policies: vec![Policy::Uniform, Policy::Approx, Policy::Optimized],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: ".".into() }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    #[allow(dead_code)]
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_structure() {
        let mut cfg = ExperimentConfig::default();
        cfg.sim.slots = 42;
        cfg.sweep.budgets_mbps_per_cell = vec![60.0, 120.0];
        cfg.output.dir = "results".into();
        let text = cfg.to_toml();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_toml("[sim]\nnot_a_field = 3\n").is_err());
        assert!(ExperimentConfig::from_toml("[nonsense]\nx = 1\n").is_err());
    }

    #[test]
    fn partial_config_uses_defaults() {
        let cfg = ExperimentConfig::from_toml("[sim]\nslots = 7\n").unwrap();
        assert_eq!(cfg.sim.slots, 7);
        assert_eq!(cfg.sim.users_per_sector, 20);
        assert_eq!(cfg.output.dir, ".");
    }
}
