//! Per-slot evaluation: round-robin scheduling, the cluster channel
//! snapshot with out-of-cluster interference folded into the noise, and the
//! scheme/policy dispatch into the quantization optimizers.

use crate::config::{Mode, Policy, Scheme, SimConfig, SimParams, Weighting};
use crate::drop::Drop;
use crate::topology::NetworkTopology;
use crate::SimError;
use vmac_core::linalg::C64;
use vmac_core::rate::{
    ascending_weight_order, sic_user_rates, su_backhaul_usage, wz_backhaul_usage, ChannelState,
    QuantizationProfile,
};
use vmac_core::su::{
    hetnet_allocate, merge_tier_results, q_from_backhaul, su_allocation_optimize_tiered,
    BackhaulAllocation, SuSettings, TierSpec,
};
use vmac_core::wz::{aco_optimize, approx_alpha, AcoSettings};

#[derive(Debug, Clone, Copy)]
pub struct ScheduledUser {
    pub bs: usize,
    pub user: usize,
}

/// Round-robin pick per BS: user `slot mod population`; empty BSs are
/// skipped.
pub fn schedule_slot(drop: &Drop, slot: usize) -> Vec<ScheduledUser> {
    drop.served_users
        .iter()
        .enumerate()
        .filter(|(_, users)| !users.is_empty())
        .map(|(bs, users)| ScheduledUser { bs, user: users[slot % users.len()] })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SlotEval {
    /// Rates of the scheduled cluster users this slot (user id, Mbps).
    pub cluster_rates_mbps: Vec<(usize, f64)>,
    pub cluster_sum_bits: f64,
    /// Backhaul usage of the chosen profile (bits/channel use); zero for
    /// the baseline scheme.
    pub usage_bits: f64,
    /// Diagonal-dominance ratio of the cluster received covariance.
    pub kappa: f64,
}

/// Cross-slot solver state: the previous allocation warm-starts the next
/// slot's optimization on the same drop.
#[derive(Debug, Clone, Default)]
pub struct WarmState {
    pub su_alloc: Option<Vec<f64>>,
}

fn baseline_slot(
    topo: &NetworkTopology,
    config: &SimConfig,
    params: &SimParams,
    drop: &Drop,
    sched: &[ScheduledUser],
) -> SlotEval {
    let mut in_cluster = vec![false; topo.num_bs()];
    for &b in &topo.cluster_bs {
        in_cluster[b] = true;
    }
    let mut rates = Vec::new();
    let mut sum_bits = 0.0;
    for s in sched.iter().filter(|s| in_cluster[s.bs]) {
        let mut interference = 0.0;
        for o in sched {
            if o.user != s.user && (config.include_out_of_cluster || in_cluster[o.bs]) {
                interference += params.tx_mw * drop.gain(o.user, s.bs);
            }
        }
        let sinr = params.tx_mw * drop.gain(s.user, s.bs) / (params.noise_mw + interference);
        let bits = (1.0 + sinr).log2();
        sum_bits += bits;
        rates.push((s.user, config.mbps_from_bits(bits)));
    }
    SlotEval { cluster_rates_mbps: rates, cluster_sum_bits: sum_bits, usage_bits: 0.0, kappa: f64::NAN }
}

fn cluster_tiers(topo: &NetworkTopology, config: &SimConfig) -> Vec<TierSpec> {
    match config.mode {
        Mode::Multicell => vec![TierSpec {
            members: (0..topo.cluster_bs.len()).collect(),
            budget_bits: config.cluster_budget_bits(topo.cluster_cells),
        }],
        Mode::Hetnet => {
            let n_macro = topo.cluster_macro_bs.len();
            let n = topo.cluster_bs.len();
            vec![
                TierSpec {
                    members: (0..n_macro).collect(),
                    budget_bits: config.macro_budget_mbps / config.bandwidth_mhz,
                },
                TierSpec {
                    members: (n_macro..n).collect(),
                    budget_bits: config.pico_budget_mbps / config.bandwidth_mhz,
                },
            ]
        }
    }
}

fn choose_profile(
    cs: &ChannelState,
    weights: &[f64],
    tiers: &[TierSpec],
    config: &SimConfig,
    solver_seed: u64,
    warm: &mut WarmState,
) -> Result<(QuantizationProfile, f64), SimError> {
    let total_budget: f64 = tiers.iter().map(|t| t.budget_bits).sum();
    let qp = match (config.scheme, config.policy) {
        (Scheme::Wz, Policy::Uniform) | (Scheme::Su, Policy::Uniform) => {
            let mut per_bs = vec![0.0; cs.num_bs()];
            for tier in tiers {
                for &i in &tier.members {
                    per_bs[i] = tier.budget_bits / tier.members.len() as f64;
                }
            }
            let alloc = BackhaulAllocation::new(per_bs, total_budget).map_err(SimError::model)?;
            q_from_backhaul(cs, &alloc).map_err(SimError::model)?
        }
        (Scheme::Wz, Policy::Approx) => approx_alpha(cs, total_budget, 1e-9).1,
        (Scheme::Wz, Policy::Optimized) => {
            // the channel is normalized to unit mean noise, so the default
            // floor applies; campaign use trades outer iterations for speed
            let settings = AcoSettings {
                max_outer_iters: 30,
                objective_tol_bits: 1e-3,
                inner_tol: 1e-6,
                ..AcoSettings::for_channel(cs)
            };
            aco_optimize(cs, weights, total_budget, &settings).map_err(SimError::solve)?.0
        }
        (Scheme::Su, Policy::Approx) => {
            let results = hetnet_allocate(cs, tiers, 1e-9).map_err(SimError::solve)?;
            merge_tier_results(cs.num_bs(), &results).1
        }
        (Scheme::Su, Policy::Optimized) => {
            let settings = SuSettings {
                max_iters: 80,
                grad_tol: 1e-4,
                random_starts: 0,
                use_uniform_start: true,
                use_approx_start: true,
                seed: solver_seed,
            };
            let extra: Vec<Vec<f64>> = warm.su_alloc.iter().cloned().collect();
            let bits = su_allocation_optimize_tiered(cs, weights, tiers, &settings, &extra)
                .map_err(SimError::solve)?;
            warm.su_alloc = Some(bits.clone());
            let alloc = BackhaulAllocation::new(bits, total_budget).map_err(SimError::model)?;
            q_from_backhaul(cs, &alloc).map_err(SimError::model)?
        }
        (Scheme::Baseline, _) => unreachable!("baseline handled separately"),
    };
    let usage = match config.scheme {
        Scheme::Wz => wz_backhaul_usage(cs, &qp).map_err(SimError::model)?,
        Scheme::Su => su_backhaul_usage(cs, &qp).map_err(SimError::model)?,
        Scheme::Baseline => 0.0,
    };
    Ok((qp, usage))
}

/// Builds the cluster channel over the scheduled in-cluster users and
/// evaluates this slot's rates under the configured scheme and policy.
pub fn evaluate_slot(
    topo: &NetworkTopology,
    config: &SimConfig,
    params: &SimParams,
    drop: &Drop,
    sched: &[ScheduledUser],
    solver_seed: u64,
    warm: &mut WarmState,
) -> Result<SlotEval, SimError> {
    if config.scheme == Scheme::Baseline {
        return Ok(baseline_slot(topo, config, params, drop, sched));
    }

    let mut in_cluster = vec![false; topo.num_bs()];
    for &b in &topo.cluster_bs {
        in_cluster[b] = true;
    }
    let mut by_bs: Vec<Option<usize>> = vec![None; topo.num_bs()];
    for s in sched {
        by_bs[s.bs] = Some(s.user);
    }
    // users ordered by the cluster BS that scheduled them
    let users: Vec<usize> =
        topo.cluster_bs.iter().filter_map(|&b| by_bs[b]).collect();
    if users.is_empty() {
        return Ok(SlotEval {
            cluster_rates_mbps: Vec::new(),
            cluster_sum_bits: 0.0,
            usage_bits: 0.0,
            kappa: f64::NAN,
        });
    }

    let l = topo.cluster_bs.len();
    let mut eff_noise = vec![params.noise_mw; l];
    if config.include_out_of_cluster {
        for s in sched.iter().filter(|s| !in_cluster[s.bs]) {
            for (i, &b) in topo.cluster_bs.iter().enumerate() {
                eff_noise[i] += params.tx_mw * drop.gain(s.user, b);
            }
        }
    }
    // normalize powers to the mean effective noise; all rate expressions
    // are invariant under this joint rescaling
    let unit = eff_noise.iter().sum::<f64>() / l as f64;
    let noise_var: Vec<f64> = eff_noise.iter().map(|&v| v / unit).collect();
    let tx = params.tx_mw / unit;

    let u = users.len();
    let mut gains = vec![C64::new(0.0, 0.0); l * u];
    for (i, &b) in topo.cluster_bs.iter().enumerate() {
        for (j, &user) in users.iter().enumerate() {
            let amp = drop.gain(user, b).sqrt();
            let ph = drop.phase(user, b);
            gains[i * u + j] = C64::new(amp * ph.cos(), amp * ph.sin());
        }
    }
    let cs = ChannelState::new(l, u, gains, vec![tx; u], noise_var).map_err(SimError::model)?;

    let weights: Vec<f64> = match config.weighting {
        Weighting::Equal => vec![1.0; users.len()],
        Weighting::Pf => {
            let raw: Vec<f64> =
                users.iter().map(|&user| drop.pf_weight(user, config.pf_floor_mbps)).collect();
            let max_w = raw.iter().fold(f64::MIN, |a, &b| a.max(b));
            raw.iter().map(|w| w / max_w).collect()
        }
    };

    let tiers = cluster_tiers(topo, config);
    let (qp, usage_bits) = choose_profile(&cs, &weights, &tiers, config, solver_seed, warm)?;

    let order = ascending_weight_order(&weights);
    let rates = sic_user_rates(&cs, &qp, &order).map_err(SimError::model)?;
    let cluster_sum_bits: f64 = rates.iter().sum();
    let cluster_rates_mbps: Vec<(usize, f64)> = users
        .iter()
        .zip(&rates)
        .map(|(&user, &bits)| (user, config.mbps_from_bits(bits)))
        .collect();

    let mut cov = cs.signal_cov();
    cov.add_real_diag(cs.noise_var());
    let kappa = vmac_core::gap::kappa_of(&cov);

    Ok(SlotEval { cluster_rates_mbps, cluster_sum_bits, usage_bits, kappa })
}
