//! Slot- and campaign-level behavior: scheduling arithmetic, the
//! infinite-backhaul limit, scheme dominance, budget monotonicity, and
//! campaign determinism.

use vmac_sim::campaign::run_campaign;
use vmac_sim::config::{Mode, Policy, Scheme, SimConfig};
use vmac_sim::csvout::format_cdf;
use vmac_sim::drop::realize_drop;
use vmac_sim::evaluate::{evaluate_slot, schedule_slot, WarmState};
use vmac_sim::topology::generate_topology;

fn desk_config() -> SimConfig {
    SimConfig { drop_seeds: vec![3], slots: 4, ..SimConfig::default() }
}

#[test]
fn round_robin_arithmetic() {
    let cfg = desk_config();
    let topo = generate_topology(&cfg);
    let drop = realize_drop(&topo, &cfg, 3);
    // a BS serving k users cycles through them with period k
    let s21 = schedule_slot(&drop, 21);
    let s1 = schedule_slot(&drop, 1);
    for (a, b) in s21.iter().zip(&s1) {
        assert_eq!(a.bs, b.bs);
        let n = drop.served_users[a.bs].len();
        assert_eq!(a.user, drop.served_users[a.bs][21 % n]);
        if n > 1 {
            let s22 = schedule_slot(&drop, 22);
            let next = s22.iter().find(|s| s.bs == a.bs).unwrap();
            assert_ne!(a.user, next.user, "consecutive slots repeat a user");
        }
    }
    // every nonempty BS schedules exactly one user
    let nonempty = drop.served_users.iter().filter(|u| !u.is_empty()).count();
    assert_eq!(s21.len(), nonempty);
}

#[test]
fn infinite_backhaul_reaches_the_air_cut() {
    let cfg = SimConfig {
        scheme: Scheme::Wz,
        policy: Policy::Approx,
        budget_mbps_per_cell: 1e6,
        include_out_of_cluster: false,
        ..desk_config()
    };
    let topo = generate_topology(&cfg);
    let params = cfg.params();
    let drop = realize_drop(&topo, &cfg, 3);
    let sched = schedule_slot(&drop, 0);
    let mut warm = WarmState::default();
    let eval = evaluate_slot(&topo, &cfg, &params, &drop, &sched, 0, &mut warm).unwrap();

    // rebuild the air-interface cut for the same scheduled set
    let users: Vec<usize> = topo
        .cluster_bs
        .iter()
        .filter_map(|&b| sched.iter().find(|s| s.bs == b).map(|s| s.user))
        .collect();
    let l = topo.cluster_bs.len();
    let mut gains = vec![vmac_core::C64::new(0.0, 0.0); l * users.len()];
    for (i, &b) in topo.cluster_bs.iter().enumerate() {
        for (j, &u) in users.iter().enumerate() {
            let amp = drop.gain(u, b).sqrt();
            let ph = drop.phase(u, b);
            gains[i * users.len() + j] = vmac_core::C64::new(amp * ph.cos(), amp * ph.sin());
        }
    }
    let unit = params.noise_mw;
    let cs = vmac_core::ChannelState::new(
        l,
        users.len(),
        gains,
        vec![params.tx_mw / unit; users.len()],
        vec![1.0; l],
    )
    .unwrap();
    let air_cut = vmac_core::rate::cutset_bound(&cs, f64::MAX);
    assert!(
        (eval.cluster_sum_bits - air_cut).abs() <= 1e-3 * air_cut,
        "slot rate {} vs air cut {air_cut}",
        eval.cluster_sum_bits
    );
}

#[test]
fn scheme_dominance_and_budget_monotonicity_per_slot() {
    let base = SimConfig {
        budget_mbps_per_cell: 270.0,
        ..desk_config()
    };
    let topo = generate_topology(&base);
    let params = base.params();
    let drop = realize_drop(&topo, &base, 3);

    for slot in 0..3 {
        let sched = schedule_slot(&drop, slot);
        let eval_for = |scheme: Scheme, policy: Policy, budget: f64| {
            let cfg = SimConfig {
                scheme,
                policy,
                budget_mbps_per_cell: budget,
                ..base.clone()
            };
            let mut warm = WarmState::default();
            evaluate_slot(&topo, &cfg, &params, &drop, &sched, 0, &mut warm).unwrap()
        };

        // equal budgets: Wyner-Ziv compresses no worse than single-user,
        // and joint decoding beats per-sector decoding
        let wz = eval_for(Scheme::Wz, Policy::Approx, 270.0);
        let su = eval_for(Scheme::Su, Policy::Approx, 270.0);
        let bl = eval_for(Scheme::Baseline, Policy::Approx, 270.0);
        assert!(
            wz.cluster_sum_bits >= su.cluster_sum_bits - 1e-9,
            "wz {} < su {}",
            wz.cluster_sum_bits,
            su.cluster_sum_bits
        );
        assert!(
            su.cluster_sum_bits >= bl.cluster_sum_bits,
            "su {} < baseline {}",
            su.cluster_sum_bits,
            bl.cluster_sum_bits
        );
        assert!(wz.usage_bits <= 270.0 * 7.0 / 10.0 + 1e-6);

        // per-slot rate is nondecreasing in the budget
        let mut prev = 0.0;
        for budget in [60.0, 120.0, 180.0, 240.0, 300.0] {
            let e = eval_for(Scheme::Su, Policy::Approx, budget);
            assert!(
                e.cluster_sum_bits >= prev - 1e-9,
                "rate fell from {prev} at budget {budget}"
            );
            prev = e.cluster_sum_bits;
        }
    }
}

#[test]
fn baseline_rate_matches_sinr_formula() {
    let cfg = SimConfig { scheme: Scheme::Baseline, ..desk_config() };
    let topo = generate_topology(&cfg);
    let params = cfg.params();
    let drop = realize_drop(&topo, &cfg, 3);
    let sched = schedule_slot(&drop, 0);
    let mut warm = WarmState::default();
    let eval = evaluate_slot(&topo, &cfg, &params, &drop, &sched, 0, &mut warm).unwrap();
    for &(user, mbps) in eval.cluster_rates_mbps.iter().take(5) {
        let serving = drop.association[user];
        let mut interference = 0.0;
        for s in &sched {
            if s.user != user {
                interference += params.tx_mw * drop.gain(s.user, serving);
            }
        }
        let sinr = params.tx_mw * drop.gain(user, serving) / (params.noise_mw + interference);
        let expect = (1.0 + sinr).log2() * cfg.bandwidth_mhz;
        assert!((mbps - expect).abs() <= 1e-9 * expect.max(1.0), "{mbps} vs {expect}");
    }
}

#[test]
fn campaign_empty_and_deterministic() {
    let empty = SimConfig { slots: 0, ..desk_config() };
    let report = run_campaign(&empty).unwrap();
    assert!(report.long_term_mbps.is_empty());
    assert_eq!(format_cdf(&report), "rate_mbps,quantile\n");

    let cfg = SimConfig { drop_seeds: vec![3, 4], slots: 3, ..desk_config() };
    let a = run_campaign(&cfg).unwrap();
    let b = run_campaign(&cfg).unwrap();
    assert_eq!(format_cdf(&a).into_bytes(), format_cdf(&b).into_bytes());
    assert_eq!(a.percell_mbps, b.percell_mbps);
}

#[test]
fn long_term_rates_are_slot_averages() {
    let cfg = SimConfig { drop_seeds: vec![9], slots: 5, ..desk_config() };
    let topo = generate_topology(&cfg);
    let params = cfg.params();
    let mut drop = realize_drop(&topo, &cfg, 9);
    let cluster_users = drop.cluster_users(&topo);
    let mut sums = vec![0.0; drop.num_users()];
    let mut warm = WarmState::default();
    for slot in 0..cfg.slots {
        let sched = schedule_slot(&drop, slot);
        let eval = evaluate_slot(&topo, &cfg, &params, &drop, &sched, 0, &mut warm).unwrap();
        for &(u, r) in &eval.cluster_rates_mbps {
            sums[u] += r;
        }
        vmac_sim::drop::update_pf_state(&mut drop, &eval.cluster_rates_mbps, cfg.pf_epsilon);
    }
    let report = run_campaign(&cfg).unwrap();
    assert_eq!(report.long_term_mbps.len(), cluster_users.len());
    for (&u, &lt) in cluster_users.iter().zip(&report.long_term_mbps) {
        assert!((lt - sums[u] / cfg.slots as f64).abs() <= 1e-9);
    }
}

#[test]
fn hetnet_campaign_meets_tier_budgets() {
    let cfg = SimConfig {
        mode: Mode::Hetnet,
        scheme: Scheme::Su,
        policy: Policy::Approx,
        drop_seeds: vec![2],
        slots: 2,
        ..SimConfig::default()
    };
    let topo = generate_topology(&cfg);
    let params = cfg.params();
    let drop = realize_drop(&topo, &cfg, 2);
    let sched = schedule_slot(&drop, 0);
    let mut warm = WarmState::default();
    let eval = evaluate_slot(&topo, &cfg, &params, &drop, &sched, 0, &mut warm).unwrap();
    let total_budget_bits = (cfg.macro_budget_mbps + cfg.pico_budget_mbps) / cfg.bandwidth_mhz;
    assert!(eval.usage_bits <= total_budget_bits + 1e-6);
    assert!(eval.cluster_sum_bits > 0.0);
    let report = run_campaign(&cfg).unwrap();
    assert!(!report.long_term_mbps.is_empty());
}
