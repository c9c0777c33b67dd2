//! Campaign driver: fixed drops per seed, sequential slots with
//! proportional-fair state, long-term rate aggregation, and budget sweeps.

use crate::config::{Mode, Policy, Scheme, SimConfig};
use crate::drop::{realize_drop, update_pf_state};
use crate::evaluate::{evaluate_slot, schedule_slot, WarmState};
use crate::rng::TAG_SOLVER;
use crate::topology::{generate_topology, NetworkTopology};
use crate::SimError;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct SlotRow {
    pub drop_seed: u64,
    pub slot: usize,
    pub sum_rate_bits: f64,
    pub usage_bits: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone)]
pub struct CampaignReport {
    /// Long-term rates (Mbps) of every cluster user, pooled across drops in
    /// seed order; empty when no slots were simulated.
    pub long_term_mbps: Vec<f64>,
    /// Average per-cell cluster throughput (Mbps) across drops.
    pub percell_mbps: f64,
    pub slot_rows: Vec<SlotRow>,
}

impl CampaignReport {
    /// Empirical CDF: sorted rates with quantiles `(i+1)/n`.
    pub fn cdf(&self) -> Vec<(f64, f64)> {
        let mut sorted = self.long_term_mbps.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len() as f64;
        sorted.iter().enumerate().map(|(i, &r)| (r, (i + 1) as f64 / n)).collect()
    }
}

struct DropOutcome {
    long_term_mbps: Vec<f64>,
    percell_mbps: f64,
    slot_rows: Vec<SlotRow>,
}

fn run_drop(
    topo: &NetworkTopology,
    config: &SimConfig,
    drop_seed: u64,
) -> Result<DropOutcome, SimError> {
    let params = config.params();
    let mut drop = realize_drop(topo, config, drop_seed);
    let cluster_users = drop.cluster_users(topo);
    let mut rate_sums = vec![0.0; drop.num_users()];
    let mut slot_rows = Vec::with_capacity(config.slots);
    let mut warm = WarmState::default();
    for slot in 0..config.slots {
        let sched = schedule_slot(&drop, slot);
        let solver_seed = config.seed
            ^ TAG_SOLVER.wrapping_mul(0x9e3779b97f4a7c15)
            ^ drop_seed.rotate_left(17)
            ^ (slot as u64).wrapping_mul(0xbf58476d1ce4e5b9);
        let eval = evaluate_slot(topo, config, &params, &drop, &sched, solver_seed, &mut warm)?;
        for &(user, mbps) in &eval.cluster_rates_mbps {
            rate_sums[user] += mbps;
        }
        slot_rows.push(SlotRow {
            drop_seed,
            slot,
            sum_rate_bits: eval.cluster_sum_bits,
            usage_bits: eval.usage_bits,
            kappa: eval.kappa,
        });
        update_pf_state(&mut drop, &eval.cluster_rates_mbps, config.pf_epsilon);
    }
    let long_term_mbps: Vec<f64> = if config.slots == 0 {
        Vec::new()
    } else {
        cluster_users.iter().map(|&u| rate_sums[u] / config.slots as f64).collect()
    };
    let percell_mbps = long_term_mbps.iter().sum::<f64>() / topo.cluster_cells as f64;
    Ok(DropOutcome { long_term_mbps, percell_mbps, slot_rows })
}

/// Runs one drop per configured seed (in parallel; outputs are ordered by
/// seed position, so results are independent of the thread layout) and
/// aggregates the long-term statistics.
pub fn run_campaign(config: &SimConfig) -> Result<CampaignReport, SimError> {
    let topo = generate_topology(config);
    let outcomes: Result<Vec<DropOutcome>, SimError> = config
        .drop_seeds
        .par_iter()
        .map(|&seed| run_drop(&topo, config, seed))
        .collect();
    let outcomes = outcomes?;
    let mut long_term_mbps = Vec::new();
    let mut slot_rows = Vec::new();
    let mut percell = 0.0;
    for o in &outcomes {
        long_term_mbps.extend(&o.long_term_mbps);
        slot_rows.extend(o.slot_rows.iter().cloned());
        percell += o.percell_mbps;
    }
    if !outcomes.is_empty() {
        percell /= outcomes.len() as f64;
    }
    Ok(CampaignReport { long_term_mbps, percell_mbps: percell, slot_rows })
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub budget_mbps: f64,
    pub scheme: Scheme,
    pub policy: Policy,
    pub percell_mbps: f64,
}

/// Per-cell sum rate over a budget grid for each scheme/policy pair. The
/// baseline is budget- and policy-independent; it is computed once and
/// emitted per budget with the policy column fixed to `uniform`.
pub fn run_budget_sweep(
    base: &SimConfig,
    budgets_mbps: &[f64],
    schemes: &[Scheme],
    policies: &[Policy],
) -> Result<Vec<SweepRow>, SimError> {
    let mut rows = Vec::new();
    let baseline_percell = if schemes.contains(&Scheme::Baseline) {
        let cfg = SimConfig { scheme: Scheme::Baseline, ..base.clone() };
        Some(run_campaign(&cfg)?.percell_mbps)
    } else {
        None
    };
    for &budget in budgets_mbps {
        for &scheme in schemes {
            if scheme == Scheme::Baseline {
                rows.push(SweepRow {
                    budget_mbps: budget,
                    scheme,
                    policy: Policy::Uniform,
                    percell_mbps: baseline_percell.expect("computed above"),
                });
                continue;
            }
            for &policy in policies {
                let cfg = match base.mode {
                    Mode::Multicell => SimConfig {
                        scheme,
                        policy,
                        budget_mbps_per_cell: budget,
                        ..base.clone()
                    },
                    // hetnet budgets scale both tiers with the macro share
                    Mode::Hetnet => {
                        let ratio = budget / (base.macro_budget_mbps + base.pico_budget_mbps);
                        SimConfig {
                            scheme,
                            policy,
                            macro_budget_mbps: base.macro_budget_mbps * ratio,
                            pico_budget_mbps: base.pico_budget_mbps * ratio,
                            ..base.clone()
                        }
                    }
                };
                rows.push(SweepRow {
                    budget_mbps: budget,
                    scheme,
                    policy,
                    percell_mbps: run_campaign(&cfg)?.percell_mbps,
                });
            }
        }
    }
    Ok(rows)
}
