//! CSV and manifest formatting with atomic file writes. All numbers are
//! emitted with fixed precision so identical campaigns produce identical
//! bytes.

use crate::campaign::{CampaignReport, SlotRow, SweepRow};
use crate::config::{Mode, SimConfig};
use std::io::Write;
use std::path::Path;

pub fn format_cdf(report: &CampaignReport) -> String {
    let mut out = String::from("rate_mbps,quantile\n");
    for (rate, q) in report.cdf() {
        out.push_str(&format!("{rate:.6},{q:.6}\n"));
    }
    out
}

pub fn format_sweep(rows: &[SweepRow]) -> String {
    let mut out = String::from("budget_mbps,scheme,policy,percell_sumrate_mbps\n");
    for r in rows {
        out.push_str(&format!(
            "{:.6},{},{},{:.6}\n",
            r.budget_mbps, r.scheme, r.policy, r.percell_mbps
        ));
    }
    out
}

pub fn format_slots(rows: &[SlotRow]) -> String {
    let mut out = String::from("seed,slot,sum_rate_bits,usage_bits,kappa\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6}\n",
            r.drop_seed, r.slot, r.sum_rate_bits, r.usage_bits, r.kappa
        ));
    }
    out
}

/// Assumption report: every modeling choice the channel tables leave open,
/// with the value this run used.
pub fn format_manifest(config: &SimConfig) -> String {
    let mode = match config.mode {
        Mode::Multicell => "multicell",
        Mode::Hetnet => "hetnet",
    };
    let ooc = if config.include_out_of_cluster {
        "folded into per-BS noise from currently scheduled out-of-cluster users"
    } else {
        "ignored (cluster simulated in isolation)"
    };
    format!(
        concat!(
            "# modeling assumptions for this campaign\n",
            "mode = \"{}\"\n",
            "scheme = \"{}\"\n",
            "policy = \"{}\"\n",
            "weighting = \"{}\"\n",
            "sector_pattern = \"-min(12*(theta/70deg)^2, 20 dB) plus {} dBi boresight gain\"\n",
            "pico_antenna = \"omnidirectional, {} dBi\"\n",
            "out_of_cluster_interference = \"{}\"\n",
            "pf_epsilon = {}\n",
            "pf_rate_floor_mbps = {:e}\n",
            "mbps_conversion = \"bits/channel-use x {} MHz\"\n",
            "budget_convention = \"multicell budgets are Mbps per cell; the cluster budget is that times the cluster cell count\"\n",
            "link_phases = \"uniform per link, fixed for the drop\"\n",
            "min_link_distance_m = {}\n",
            "channel_normalization = \"slot channels normalized to mean effective noise\"\n",
            "aco_initialization = \"q = gamma * 1 with gamma the mean effective noise\"\n",
            "shadowing = \"correlation {} across sites; macro sigma {} dB, pico sigma {} dB\"\n",
        ),
        mode,
        config.scheme,
        config.policy,
        config.weighting,
        config.antenna_gain_dbi,
        config.antenna_gain_dbi,
        ooc,
        config.pf_epsilon,
        config.pf_floor_mbps,
        config.bandwidth_mhz,
        config.min_link_distance_m,
        config.shadow_correlation,
        config.shadow_sigma_macro_db,
        config.shadow_sigma_pico_db,
    )
}

/// Writes through a temporary file and renames into place.
pub fn write_atomic(path: &Path, content: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
