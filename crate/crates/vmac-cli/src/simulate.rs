//! `simulate` and `sweep` subcommands: run campaigns from an experiment
//! configuration and write the CDF, sweep, diagnostic, and manifest files.

use crate::config::ExperimentConfig;
use crate::errors::CliError;
use std::path::Path;
use vmac_sim::campaign::{run_budget_sweep, run_campaign};
use vmac_sim::config::{Mode, Policy, Scheme, SimConfig};
use vmac_sim::csvout::{format_cdf, format_manifest, format_slots, format_sweep, write_atomic};

fn budget_label(mbps: f64) -> String {
    if (mbps - mbps.round()).abs() < 1e-9 {
        format!("{}", mbps.round() as i64)
    } else {
        format!("{mbps:.1}")
    }
}

fn budgets_of(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.sweep.budgets_mbps_per_cell.is_empty() {
        vec![cfg.sim.budget_mbps_per_cell]
    } else {
        cfg.sweep.budgets_mbps_per_cell.clone()
    }
}

/// Runs one campaign per (scheme, policy, budget) combination and writes a
/// CDF file for each; the baseline is budget-independent and produces one
/// file. Deterministic for a fixed configuration.
pub fn cmd_simulate(
    cfg: &ExperimentConfig,
    schemes: &[Scheme],
    policies: &[Policy],
    out_dir: &Path,
    verbose: bool,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)?;
    write_atomic(&out_dir.join("manifest.txt"), &format_manifest(&cfg.sim))?;

    for &scheme in schemes {
        if scheme == Scheme::Baseline {
            let sim = SimConfig { scheme, ..cfg.sim.clone() };
            let report = run_campaign(&sim)?;
            write_atomic(&out_dir.join("cdf_baseline.csv"), &format_cdf(&report))?;
            if verbose {
                write_atomic(&out_dir.join("slots_baseline.csv"), &format_slots(&report.slot_rows))?;
            }
            continue;
        }
        for &policy in policies {
            match cfg.sim.mode {
                Mode::Multicell => {
                    for &budget in &budgets_of(cfg) {
                        let sim = SimConfig {
                            scheme,
                            policy,
                            budget_mbps_per_cell: budget,
                            ..cfg.sim.clone()
                        };
                        let report = run_campaign(&sim)?;
                        let label =
                            format!("{scheme}_{policy}_{}mbps", budget_label(budget));
                        write_atomic(
                            &out_dir.join(format!("cdf_{label}.csv")),
                            &format_cdf(&report),
                        )?;
                        if verbose {
                            write_atomic(
                                &out_dir.join(format!("slots_{label}.csv")),
                                &format_slots(&report.slot_rows),
                            )?;
                        }
                    }
                }
                Mode::Hetnet => {
                    let sim = SimConfig { scheme, policy, ..cfg.sim.clone() };
                    let report = run_campaign(&sim)?;
                    let label = format!(
                        "{scheme}_{policy}_hetnet_{}_{}mbps",
                        budget_label(cfg.sim.macro_budget_mbps),
                        budget_label(cfg.sim.pico_budget_mbps)
                    );
                    write_atomic(&out_dir.join(format!("cdf_{label}.csv")), &format_cdf(&report))?;
                    if verbose {
                        write_atomic(
                            &out_dir.join(format!("slots_{label}.csv")),
                            &format_slots(&report.slot_rows),
                        )?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Per-cell sum rate over the configured budget grid for every scheme and
/// policy, written as one sweep table.
pub fn cmd_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)?;
    write_atomic(&out_dir.join("manifest.txt"), &format_manifest(&cfg.sim))?;
    let rows = run_budget_sweep(
        &cfg.sim,
        &budgets_of(cfg),
        &cfg.sweep.schemes,
        &cfg.sweep.policies,
    )?;
    write_atomic(&out_dir.join("sweep.csv"), &format_sweep(&rows))?;
    Ok(())
}
