//! Simulation configuration: the channel-model parameters of the multicell
//! and heterogeneous setups, scheme/policy selectors, and the derived
//! linear-scale quantities.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Multicell,
    Hetnet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Conventional per-sector decoding, all interference treated as noise.
    Baseline,
    /// Wyner-Ziv compression at the base stations.
    Wz,
    /// Per-BS single-user compression.
    Su,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Equal backhaul rate per BS, quantization noise implied.
    Uniform,
    /// Quantization noise proportional to background noise via bisection.
    Approx,
    /// Locally optimized quantization noise / backhaul allocation.
    Optimized,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Baseline => "baseline",
            Scheme::Wz => "wz",
            Scheme::Su => "su",
        })
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Uniform => "uniform",
            Policy::Approx => "approx",
            Policy::Optimized => "optimized",
        })
    }
}

/// Weights handed to the per-slot optimizer and decode-order selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Proportional fairness: reciprocal of the averaged long-term rate.
    Pf,
    /// Plain sum-rate maximization.
    Equal,
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::Pf => "pf",
            Weighting::Equal => "equal",
        })
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Campaign configuration. Defaults reproduce the multicell table; dB
/// quantities are converted to linear once, at [`SimConfig::params`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub mode: Mode,
    /// Master seed for topology and all derived streams.
    pub seed: u64,
    /// One drop is realized per entry.
    pub drop_seeds: Vec<u64>,
    pub slots: usize,
    pub scheme: Scheme,
    pub policy: Policy,
    /// Weighting of the per-slot objective: proportional-fair for the rate
    /// CDF campaigns, equal for sum-rate budget sweeps.
    pub weighting: Weighting,
    /// Multicell mode: sum backhaul per macro cell in Mbps (the cluster
    /// budget is this times the number of cluster cells).
    pub budget_mbps_per_cell: f64,
    /// Hetnet mode: per-cluster tier budgets in Mbps.
    pub macro_budget_mbps: f64,
    pub pico_budget_mbps: f64,
    /// Fold interference from scheduled out-of-cluster users into the
    /// per-BS noise; disable to simulate the cluster in isolation.
    pub include_out_of_cluster: bool,
    pub bandwidth_mhz: f64,
    pub tx_power_dbm: f64,
    pub noise_dbm_per_hz: f64,
    pub noise_figure_db: f64,
    pub antenna_gain_dbi: f64,
    pub users_per_sector: usize,
    pub isd_m: f64,
    pub min_bs_separation_m: f64,
    pub picos_per_sector: usize,
    pub pl_macro_const_db: f64,
    pub pl_macro_slope_db: f64,
    pub pl_pico_const_db: f64,
    pub pl_pico_slope_db: f64,
    pub shadow_sigma_macro_db: f64,
    pub shadow_sigma_pico_db: f64,
    pub shadow_correlation: f64,
    pub pf_epsilon: f64,
    pub pf_floor_mbps: f64,
    /// Link distances are clamped below this to keep path loss finite.
    pub min_link_distance_m: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Multicell,
            seed: 1,
            drop_seeds: vec![1],
            slots: 100,
            scheme: Scheme::Su,
            policy: Policy::Approx,
            weighting: Weighting::Pf,
            budget_mbps_per_cell: 120.0,
            macro_budget_mbps: 189.0,
            pico_budget_mbps: 81.0,
            include_out_of_cluster: true,
            bandwidth_mhz: 10.0,
            tx_power_dbm: 23.0,
            noise_dbm_per_hz: -169.0,
            noise_figure_db: 7.0,
            antenna_gain_dbi: 14.0,
            users_per_sector: 20,
            isd_m: 500.0,
            min_bs_separation_m: 75.0,
            picos_per_sector: 3,
            pl_macro_const_db: 128.1,
            pl_macro_slope_db: 37.6,
            pl_pico_const_db: 140.7,
            pl_pico_slope_db: 36.7,
            shadow_sigma_macro_db: 8.0,
            shadow_sigma_pico_db: 4.0,
            shadow_correlation: 0.5,
            pf_epsilon: 0.01,
            pf_floor_mbps: 1e-6,
            min_link_distance_m: 10.0,
        }
    }
}

/// Linear-scale quantities derived once from the configuration.
#[derive(Debug, Clone)]
pub struct SimParams {
    pub tx_mw: f64,
    /// Thermal noise over the channel bandwidth including the noise figure.
    pub noise_mw: f64,
}

impl SimConfig {
    pub fn params(&self) -> SimParams {
        let bw_hz = self.bandwidth_mhz * 1e6;
        let noise_dbm = self.noise_dbm_per_hz + 10.0 * bw_hz.log10() + self.noise_figure_db;
        SimParams { tx_mw: db_to_linear(self.tx_power_dbm), noise_mw: db_to_linear(noise_dbm) }
    }

    /// Per-channel-use budget of the whole cluster, bits.
    pub fn cluster_budget_bits(&self, cluster_cells: usize) -> f64 {
        match self.mode {
            Mode::Multicell => self.budget_mbps_per_cell * cluster_cells as f64 / self.bandwidth_mhz,
            Mode::Hetnet => (self.macro_budget_mbps + self.pico_budget_mbps) / self.bandwidth_mhz,
        }
    }

    pub fn mbps_from_bits(&self, bits_per_use: f64) -> f64 {
        bits_per_use * self.bandwidth_mhz
    }
}
