//! `optimize` subcommand: solve one channel instance for the chosen scheme
//! and policy, then write the profile, allocation, rates, and trace.

use crate::errors::CliError;
use crate::instance::Instance;
use std::fmt::Write as _;
use std::path::Path;
use vmac_core::rate::{su_backhaul_usage, weighted_sum_rate, wz_backhaul_usage};
use vmac_core::su::{
    approx_beta, q_from_backhaul, su_allocation_optimize, BackhaulAllocation, SuSettings,
    TierSpec,
};
use vmac_core::wz::{aco_optimize, approx_alpha, AcoSettings, AcoTrace};
use vmac_core::QuantizationProfile;
use vmac_sim::config::{Policy, Scheme};

pub struct OptimizeOutcome {
    pub report: String,
}

fn fmt_vec(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.9}")).collect::<Vec<_>>().join(" ")
}

pub fn run(
    inst: &Instance,
    scheme: Scheme,
    policy: Policy,
) -> Result<OptimizeOutcome, CliError> {
    let cs = &inst.channel;
    let l = cs.num_bs();
    let budget = inst.budget_bits;

    let qp: QuantizationProfile;
    let mut alloc: Option<BackhaulAllocation> = None;
    let mut alpha: Option<f64> = None;
    let mut beta: Option<f64> = None;
    let mut trace: Option<AcoTrace> = None;

    match (scheme, policy) {
        (Scheme::Baseline, _) => {
            return Err(CliError::Usage(
                "the optimize subcommand applies to the wz and su schemes".into(),
            ))
        }
        (_, Policy::Uniform) => {
            let a = BackhaulAllocation::uniform(l, budget);
            qp = q_from_backhaul(cs, &a)?;
            alloc = Some(a);
        }
        (Scheme::Wz, Policy::Approx) => {
            let (a, profile) = approx_alpha(cs, budget, 1e-9);
            alpha = Some(a);
            qp = profile;
        }
        (Scheme::Wz, Policy::Optimized) => {
            let settings = AcoSettings::for_channel(cs);
            let (profile, t) = aco_optimize(cs, &inst.weights, budget, &settings)?;
            qp = profile;
            trace = Some(t);
        }
        (Scheme::Su, Policy::Approx) => {
            let tier = TierSpec { members: (0..l).collect(), budget_bits: budget };
            let t = approx_beta(cs, &tier, 1e-9)?;
            beta = Some(t.beta);
            qp = t.profile;
            alloc = Some(t.allocation);
        }
        (Scheme::Su, Policy::Optimized) => {
            let a = su_allocation_optimize(cs, &inst.weights, budget, &SuSettings::default())?;
            qp = q_from_backhaul(cs, &a)?;
            alloc = Some(a);
        }
    }

    // a profile that disconnects every BS would be a solver defect
    if qp.connected_bs().is_empty() {
        return Err(CliError::Internal("solver disconnected every base station".into()));
    }

    let rate = weighted_sum_rate(cs, &qp, &inst.weights)?;
    let wz_usage = wz_backhaul_usage(cs, &qp)?;
    let su_usage = su_backhaul_usage(cs, &qp)?;
    let scheme_usage = match scheme {
        Scheme::Wz => wz_usage,
        _ => su_usage,
    };
    if scheme_usage > budget + 1e-6 {
        return Err(CliError::Internal(format!(
            "usage {scheme_usage} exceeds the budget {budget}"
        )));
    }
    if !rate.is_finite() || rate < 0.0 {
        return Err(CliError::Internal(format!("invalid achieved rate {rate}")));
    }

    let mut report = String::new();
    let _ = writeln!(report, "scheme={scheme}");
    let _ = writeln!(report, "policy={policy}");
    let _ = writeln!(report, "num_bs={l}");
    let _ = writeln!(report, "num_users={}", cs.num_users());
    let _ = writeln!(report, "budget_bits={budget:.9}");
    if let Some(a) = alpha {
        let _ = writeln!(report, "alpha={a:.9}");
    }
    if let Some(b) = beta {
        let _ = writeln!(report, "beta={b:.9}");
    }
    let _ = writeln!(report, "q={}", fmt_vec(qp.levels()));
    if let Some(a) = &alloc {
        let _ = writeln!(report, "alloc_bits={}", fmt_vec(a.per_bs_bits()));
    }
    let _ = writeln!(report, "weighted_sum_rate_bits={rate:.9}");
    let _ = writeln!(report, "wz_usage_bits={wz_usage:.9}");
    let _ = writeln!(report, "su_usage_bits={su_usage:.9}");
    if let Some(t) = &trace {
        for row in &t.rows {
            let _ = writeln!(
                report,
                "trace={},{:.9},{:.9}",
                row.iteration, row.objective_bits, row.usage_bits
            );
        }
        let _ = writeln!(report, "backhaul_dual={:.9}", t.backhaul_dual);
    }
    Ok(OptimizeOutcome { report })
}

pub fn write_report(out_dir: &Path, outcome: &OptimizeOutcome) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)?;
    vmac_sim::csvout::write_atomic(&out_dir.join("optimize_report.txt"), &outcome.report)?;
    Ok(())
}
