//! Quantization design for per-BS single-user compression, reformulated as
//! backhaul-rate allocation.
//!
//! Giving BS `i` a backhaul rate `C_i` pins its quantization noise through
//! the single-user usage equation, so the weighted sum rate becomes a
//! function of the allocation over the polyhedron `{C_i >= 0, sum C_i <= C}`.
//! A multi-start projected-gradient ascent finds a local optimum; the
//! high-SQNR bisection of [`approx_beta`] gives the near-optimal
//! proportional-noise allocation, per tier in heterogeneous deployments.

use crate::linalg::{HermitianMatrix, C64};
use crate::rate::{ChannelState, ModelError, QuantizationProfile};
use crate::solver::{bisect_decreasing, weight_decomposition, SolveError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::LN_2;

/// Per-BS backhaul rates under a sum budget (bits per channel use).
#[derive(Debug, Clone, PartialEq)]
pub struct BackhaulAllocation {
    per_bs_bits: Vec<f64>,
    budget_bits: f64,
}

impl BackhaulAllocation {
    pub fn new(per_bs_bits: Vec<f64>, budget_bits: f64) -> Result<Self, ModelError> {
        let mut total = 0.0;
        for (i, &c) in per_bs_bits.iter().enumerate() {
            if c.is_nan() || c < 0.0 {
                return Err(ModelError::NegativeBackhaul { index: i });
            }
            total += c;
        }
        if total > budget_bits + 1e-9 {
            return Err(ModelError::BadValue { what: "allocation exceeding budget", index: 0 });
        }
        Ok(Self { per_bs_bits, budget_bits })
    }

    pub fn uniform(num_bs: usize, budget_bits: f64) -> Self {
        Self { per_bs_bits: vec![budget_bits / num_bs as f64; num_bs], budget_bits }
    }

    pub fn per_bs_bits(&self) -> &[f64] {
        &self.per_bs_bits
    }

    pub fn budget_bits(&self) -> f64 {
        self.budget_bits
    }

    pub fn total_bits(&self) -> f64 {
        self.per_bs_bits.iter().sum()
    }
}

/// A backhaul tier: member BS indices sharing one sum-capacity budget.
#[derive(Debug, Clone)]
pub struct TierSpec {
    pub members: Vec<usize>,
    pub budget_bits: f64,
}

/// Result of the proportional-noise allocation for one tier.
#[derive(Debug, Clone)]
pub struct TierAllocation {
    pub beta: f64,
    pub allocation: BackhaulAllocation,
    /// Full-length profile: finite for tier members with positive rate,
    /// infinite elsewhere.
    pub profile: QuantizationProfile,
}

fn check_alloc(cs: &ChannelState, alloc: &BackhaulAllocation) -> Result<(), ModelError> {
    if alloc.per_bs_bits.len() != cs.num_bs() {
        return Err(ModelError::BadDimension {
            what: "backhaul allocation",
            expected: cs.num_bs(),
            found: alloc.per_bs_bits.len(),
        });
    }
    Ok(())
}

/// Quantization noise implied by a backhaul allocation:
/// `q_i = (sum_j P_j |h_ij|^2 + sigma_i^2) / (2^{C_i} - 1)`; a zero rate
/// maps to infinite noise (the BS forwards nothing).
pub fn q_from_backhaul(
    cs: &ChannelState,
    alloc: &BackhaulAllocation,
) -> Result<QuantizationProfile, ModelError> {
    check_alloc(cs, alloc)?;
    let levels = alloc
        .per_bs_bits
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            if c == 0.0 {
                f64::INFINITY
            } else {
                (cs.received_power(i) + cs.noise_var()[i]) / (c * LN_2).exp_m1()
            }
        })
        .collect();
    QuantizationProfile::new(levels)
}

/// Combined quantization and background noise
/// `gamma_i = (sum_j P_j |h_ij|^2 + sigma_i^2 2^{C_i}) / (2^{C_i} - 1)`;
/// equals `sigma_i^2 + q_i`.
pub fn gamma_from_backhaul(
    cs: &ChannelState,
    alloc: &BackhaulAllocation,
) -> Result<Vec<f64>, ModelError> {
    check_alloc(cs, alloc)?;
    Ok(alloc
        .per_bs_bits
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            if c == 0.0 {
                f64::INFINITY
            } else {
                let two_c = (c * LN_2).exp();
                (cs.received_power(i) + cs.noise_var()[i] * two_c) / (two_c - 1.0)
            }
        })
        .collect())
}

/// Signal-only suffix covariances in decode order: entry `k` is
/// `sum_{m >= k} P_(m) h_(m) h_(m)^H`.
fn suffix_signal(cs: &ChannelState, order: &[usize]) -> Vec<HermitianMatrix> {
    let u = order.len();
    let mut out = vec![HermitianMatrix::zeros(0); u];
    let mut m = HermitianMatrix::zeros(cs.num_bs());
    for k in (0..u).rev() {
        let j = order[k];
        m.add_scaled_outer(&cs.user_vector(j), cs.tx_power()[j]).expect("BS dimension");
        out[k] = m.clone();
    }
    out
}

fn objective_from_parts(
    suffix: &[HermitianMatrix],
    diffs: &[f64],
    inv_sqrt_gamma: &[f64],
) -> Result<f64, ModelError> {
    let mut obj = 0.0;
    for (k, a) in suffix.iter().enumerate() {
        if diffs[k] > 0.0 {
            let mut m = a.diag_congruence(inv_sqrt_gamma);
            m.add_real_diag(&vec![1.0; a.dim()]);
            obj += diffs[k] * m.logdet()?;
        }
    }
    Ok(obj / LN_2)
}

/// Weighted sum rate as a function of the backhaul allocation:
/// `sum_i (mu_i - mu_{i-1}) log2 |Upsilon A_i + I|` with
/// `Upsilon = diag(1/gamma_i)`. Exactly equals the rate-model weighted sum
/// rate at [`q_from_backhaul`], by substitution.
pub fn su_allocation_objective(
    cs: &ChannelState,
    weights: &[f64],
    alloc: &BackhaulAllocation,
) -> Result<f64, ModelError> {
    check_alloc(cs, alloc)?;
    let decomp = weight_decomposition(weights)?;
    let gamma = gamma_from_backhaul(cs, alloc)?;
    let inv_sqrt: Vec<f64> =
        gamma.iter().map(|&g| if g.is_finite() { 1.0 / g.sqrt() } else { 0.0 }).collect();
    let suffix = suffix_signal(cs, &decomp.order);
    objective_from_parts(&suffix, &decomp.diffs, &inv_sqrt)
}

#[derive(Debug, Clone)]
pub struct SuSettings {
    pub max_iters: usize,
    /// Projected-gradient infinity-norm stopping tolerance (bits).
    pub grad_tol: f64,
    pub random_starts: usize,
    pub use_uniform_start: bool,
    /// Also start from the proportional-noise allocation; guarantees the
    /// optimized objective dominates the approximate one.
    pub use_approx_start: bool,
    pub seed: u64,
}

impl Default for SuSettings {
    fn default() -> Self {
        Self {
            max_iters: 300,
            grad_tol: 1e-6,
            random_starts: 5,
            use_uniform_start: true,
            use_approx_start: true,
            seed: 0,
        }
    }
}

/// Euclidean projection of `x` onto `{y >= 0, sum y <= budget}`.
fn project_capped_simplex(x: &[f64], budget: f64) -> Vec<f64> {
    let clipped: Vec<f64> = x.iter().map(|&v| v.max(0.0)).collect();
    if clipped.iter().sum::<f64>() <= budget {
        return clipped;
    }
    // equality projection onto the simplex of size `budget`
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut tau = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        acc += v;
        let t = (acc - budget) / (k + 1) as f64;
        if k + 1 == sorted.len() || sorted[k + 1] <= t {
            tau = t;
            if sorted[k + 1..].iter().all(|&w| w <= t) {
                break;
            }
        }
    }
    x.iter().map(|&v| (v - tau).max(0.0)).collect()
}

struct TieredProblem<'a> {
    cs: &'a ChannelState,
    tiers: &'a [TierSpec],
    suffix: Vec<HermitianMatrix>,
    diffs: Vec<f64>,
    /// Received signal power plus noise per BS.
    recv: Vec<f64>,
}

impl TieredProblem<'_> {
    fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        for tier in self.tiers {
            let block: Vec<f64> = tier.members.iter().map(|&i| x[i]).collect();
            let proj = project_capped_simplex(&block, tier.budget_bits);
            for (&i, v) in tier.members.iter().zip(proj) {
                out[i] = v;
            }
        }
        out
    }

    /// Distributes remaining tier slack uniformly; the objective is strictly
    /// increasing in every rate, so exhausting the budget only helps.
    fn top_up(&self, x: &mut [f64]) {
        for tier in self.tiers {
            let used: f64 = tier.members.iter().map(|&i| x[i]).sum();
            let slack = tier.budget_bits - used;
            if slack > 0.0 {
                let add = slack / tier.members.len() as f64;
                for &i in &tier.members {
                    x[i] += add;
                }
            }
        }
    }

    fn inv_sqrt_gamma(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, &c)| {
                if c <= 0.0 {
                    0.0
                } else {
                    let expm1 = (c * LN_2).exp_m1();
                    let gamma = (self.recv[i] + self.cs.noise_var()[i] * expm1) / expm1;
                    1.0 / gamma.sqrt()
                }
            })
            .collect()
    }

    fn objective(&self, x: &[f64]) -> f64 {
        objective_from_parts(&self.suffix, &self.diffs, &self.inv_sqrt_gamma(x))
            .expect("scaled covariance plus identity is positive definite")
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let l = self.cs.num_bs();
        let s = self.inv_sqrt_gamma(x);
        let mut rho = vec![0.0; l];
        for (k, a) in self.suffix.iter().enumerate() {
            if self.diffs[k] <= 0.0 {
                continue;
            }
            let mut m = a.diag_congruence(&s);
            m.add_real_diag(&vec![1.0; l]);
            let chol = m.cholesky().expect("positive definite");
            for i in 0..l {
                // d/d upsilon_i of ln|Upsilon A + I| = A_ii - w^H M^{-1} w
                let w: Vec<C64> =
                    (0..l).map(|r| a.entry(r, i) * s[r]).collect();
                rho[i] += self.diffs[k] * (a.entry(i, i).re - chol.quadratic_form(&w));
            }
        }
        (0..l)
            .map(|i| {
                let two_c = (x[i] * LN_2).exp();
                let denom = self.recv[i] + (self.cs.noise_var()[i]) * (two_c - 1.0);
                // d upsilon / dC divided by ln 2 cancels the nats-to-bits factor
                rho[i] * two_c * self.recv[i] / (denom * denom)
            })
            .collect()
    }

    fn ascend(&self, start: &[f64], settings: &SuSettings) -> (Vec<f64>, f64) {
        let mut x = self.project(start);
        let mut step = 1.0;
        for _ in 0..settings.max_iters {
            let g = self.gradient(&x);
            let probe = self.project(&add_scaled(&x, &g, 1.0));
            let pg = x
                .iter()
                .zip(&probe)
                .fold(0.0f64, |a, (xi, pi)| a.max((pi - xi).abs()));
            if pg <= settings.grad_tol {
                break;
            }
            let f0 = self.objective(&x);
            let mut accepted = false;
            for _ in 0..40 {
                let trial = self.project(&add_scaled(&x, &g, step));
                let inner: f64 =
                    g.iter().zip(trial.iter().zip(&x)).map(|(gi, (ti, xi))| gi * (ti - xi)).sum();
                if inner <= 0.0 {
                    break;
                }
                if self.objective(&trial) >= f0 + 1e-4 * inner {
                    x = trial;
                    accepted = true;
                    step = (step * 1.5).min(1e4);
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        self.top_up(&mut x);
        let f = self.objective(&x);
        (x, f)
    }
}

fn add_scaled(x: &[f64], g: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(g).map(|(xi, gi)| xi + t * gi).collect()
}

fn validate_partition(cs: &ChannelState, tiers: &[TierSpec]) -> Result<(), SolveError> {
    let mut seen = vec![false; cs.num_bs()];
    for tier in tiers {
        if !(tier.budget_bits >= 0.0) {
            return Err(SolveError::Infeasible { detail: "negative tier budget".into() });
        }
        for &i in &tier.members {
            if i >= cs.num_bs() || seen[i] {
                return Err(SolveError::Infeasible {
                    detail: "tiers must partition the BS set".into(),
                });
            }
            seen[i] = true;
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(SolveError::Infeasible { detail: "tiers must cover every BS".into() });
    }
    Ok(())
}

/// Multi-start projected-gradient ascent of the allocation objective over
/// per-tier budget polyhedra. Returns the per-BS rates of the best start.
pub fn su_allocation_optimize_tiered(
    cs: &ChannelState,
    weights: &[f64],
    tiers: &[TierSpec],
    settings: &SuSettings,
    extra_starts: &[Vec<f64>],
) -> Result<Vec<f64>, SolveError> {
    validate_partition(cs, tiers)?;
    let decomp = weight_decomposition(weights)?;
    let problem = TieredProblem {
        cs,
        tiers,
        suffix: suffix_signal(cs, &decomp.order),
        diffs: decomp.diffs.clone(),
        recv: (0..cs.num_bs()).map(|i| cs.received_power(i) + cs.noise_var()[i]).collect(),
    };

    let l = cs.num_bs();
    let mut starts: Vec<Vec<f64>> = Vec::new();
    if settings.use_uniform_start {
        let mut u = vec![0.0; l];
        for tier in tiers {
            for &i in &tier.members {
                u[i] = tier.budget_bits / tier.members.len() as f64;
            }
        }
        starts.push(u);
    }
    if settings.use_approx_start {
        let mut a = vec![0.0; l];
        let mut ok = true;
        for tier in tiers {
            if tier.budget_bits > 0.0 {
                match approx_beta(cs, tier, 1e-9) {
                    Ok(t) => {
                        for &i in &tier.members {
                            a[i] = t.allocation.per_bs_bits()[i];
                        }
                    }
                    Err(_) => ok = false,
                }
            }
        }
        if ok {
            starts.push(a);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    for _ in 0..settings.random_starts {
        let mut r = vec![0.0; l];
        for tier in tiers {
            let draws: Vec<f64> =
                tier.members.iter().map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let total: f64 = draws.iter().sum();
            for (&i, &d) in tier.members.iter().zip(&draws) {
                r[i] = tier.budget_bits * d / total.max(1e-300);
            }
        }
        starts.push(r);
    }
    starts.extend(extra_starts.iter().cloned());
    if starts.is_empty() {
        starts.push(vec![0.0; l]);
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in &starts {
        let (x, f) = problem.ascend(start, settings);
        if best.as_ref().map_or(true, |(_, bf)| f > *bf) {
            best = Some((x, f));
        }
    }
    Ok(best.expect("at least one start").0)
}

/// Local maximizer of the allocation objective under a single sum budget;
/// the returned allocation exhausts the budget.
pub fn su_allocation_optimize(
    cs: &ChannelState,
    weights: &[f64],
    budget_bits: f64,
    settings: &SuSettings,
) -> Result<BackhaulAllocation, SolveError> {
    if !(budget_bits > 0.0) {
        return Err(SolveError::Infeasible { detail: "budget must be positive".into() });
    }
    let tier = TierSpec { members: (0..cs.num_bs()).collect(), budget_bits };
    let bits = su_allocation_optimize_tiered(cs, weights, &[tier], settings, &[])?;
    Ok(BackhaulAllocation::new(bits, budget_bits)?)
}

fn csu_of_beta(snr: &[f64], beta: f64) -> f64 {
    snr.iter().map(|&s| ((1.0 - beta) / beta * s + 1.0 / beta).log2()).sum()
}

/// Proportional-noise allocation for one tier: bisection on the
/// proportionality dual `beta` so the tier's single-user usage meets its
/// budget, rates clipped at zero with the clipped BSs removed and the
/// remainder re-bisected until stable.
pub fn approx_beta(
    cs: &ChannelState,
    tier: &TierSpec,
    tol_bits: f64,
) -> Result<TierAllocation, SolveError> {
    if !(tier.budget_bits > 0.0) {
        return Err(SolveError::Infeasible { detail: "tier budget must be positive".into() });
    }
    for &i in &tier.members {
        if i >= cs.num_bs() {
            return Err(SolveError::Infeasible { detail: "tier member out of range".into() });
        }
    }
    let mut active: Vec<usize> = tier.members.clone();
    let mut beta = 0.5;
    let mut rates: Vec<f64> = Vec::new();
    for _round in 0..=tier.members.len() {
        if active.is_empty() {
            return Err(SolveError::Infeasible {
                detail: "all base stations clipped out of the tier".into(),
            });
        }
        let snr: Vec<f64> =
            active.iter().map(|&i| cs.received_power(i) / cs.noise_var()[i]).collect();
        beta = bisect_decreasing(
            |b| csu_of_beta(&snr, b),
            tier.budget_bits,
            0.0,
            1.0,
            tol_bits,
            500,
        );
        rates = snr.iter().map(|&s| ((1.0 - beta) / beta * s + 1.0 / beta).log2()).collect();
        let clipped: Vec<usize> = active
            .iter()
            .zip(&rates)
            .filter(|(_, &r)| r < 0.0)
            .map(|(&i, _)| i)
            .collect();
        if clipped.is_empty() {
            break;
        }
        active.retain(|i| !clipped.contains(i));
    }

    let mut per_bs = vec![0.0; cs.num_bs()];
    let mut q = vec![f64::INFINITY; cs.num_bs()];
    for (&i, &r) in active.iter().zip(&rates) {
        per_bs[i] = r.max(0.0);
        q[i] = beta / (1.0 - beta) * cs.noise_var()[i];
    }
    Ok(TierAllocation {
        beta,
        allocation: BackhaulAllocation::new(per_bs, tier.budget_bits)?,
        profile: QuantizationProfile::new(q)?,
    })
}

/// Runs the proportional-noise bisection independently in every tier.
pub fn hetnet_allocate(
    cs: &ChannelState,
    tiers: &[TierSpec],
    tol_bits: f64,
) -> Result<Vec<TierAllocation>, SolveError> {
    validate_partition(cs, tiers)?;
    tiers.iter().map(|t| approx_beta(cs, t, tol_bits)).collect()
}

/// Merges per-tier results into one profile and one per-BS rate vector.
pub fn merge_tier_results(
    num_bs: usize,
    results: &[TierAllocation],
) -> (Vec<f64>, QuantizationProfile) {
    let mut bits = vec![0.0; num_bs];
    let mut q = vec![f64::INFINITY; num_bs];
    for r in results {
        for i in 0..num_bs {
            let c = r.allocation.per_bs_bits()[i];
            if c > 0.0 {
                bits[i] = c;
                q[i] = r.profile.levels()[i];
            }
        }
    }
    (bits, QuantizationProfile::new(q).expect("nonnegative levels"))
}

/// Best split of a total budget between two coupled tiers (the second tier
/// additionally capped), by grid search plus golden-section refinement on
/// the second tier's share.
#[derive(Debug, Clone)]
pub struct CoupledSplit {
    pub first_budget_bits: f64,
    pub second_budget_bits: f64,
    pub tiers: Vec<TierAllocation>,
    pub sum_rate_bits: f64,
}

pub fn hetnet_coupled_allocate(
    cs: &ChannelState,
    tiers: &[TierSpec],
    total_bits: f64,
    second_cap_bits: f64,
    grid: usize,
) -> Result<CoupledSplit, SolveError> {
    if tiers.len() != 2 {
        return Err(SolveError::Infeasible { detail: "coupled split needs two tiers".into() });
    }
    validate_partition(cs, tiers)?;
    if second_cap_bits > total_bits {
        return Err(SolveError::Infeasible {
            detail: "second-tier cap exceeds the total budget".into(),
        });
    }

    let silent = || TierAllocation {
        beta: 1.0,
        allocation: BackhaulAllocation::new(vec![0.0; cs.num_bs()], 0.0)
            .expect("zero allocation is valid"),
        profile: QuantizationProfile::new(vec![f64::INFINITY; cs.num_bs()])
            .expect("infinite levels are valid"),
    };

    let evaluate = |second: f64| -> Result<(f64, Vec<TierAllocation>), SolveError> {
        let budgets = [total_bits - second, second];
        let mut results = Vec::with_capacity(2);
        for (tier, &b) in tiers.iter().zip(&budgets) {
            if b > 1e-12 {
                results.push(approx_beta(
                    cs,
                    &TierSpec { members: tier.members.clone(), budget_bits: b },
                    1e-9,
                )?);
            } else {
                results.push(silent());
            }
        }
        let (_, qp) = merge_tier_results(cs.num_bs(), &results);
        let rate = crate::rate::sum_rate(cs, &qp)?;
        Ok((rate, results))
    };

    let points = grid.max(2);
    let mut best_second = 0.0;
    let mut best_rate = f64::NEG_INFINITY;
    for j in 0..points {
        let second = second_cap_bits * j as f64 / (points - 1) as f64;
        let (rate, _) = evaluate(second)?;
        if rate > best_rate {
            best_rate = rate;
            best_second = second;
        }
    }
    // golden-section refinement around the best grid point
    let step = second_cap_bits / (points - 1) as f64;
    let mut lo = (best_second - step).max(0.0);
    let mut hi = (best_second + step).min(second_cap_bits);
    if hi > lo {
        let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let mut f1 = evaluate(x1)?.0;
        let mut f2 = evaluate(x2)?.0;
        for _ in 0..40 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = evaluate(x2)?.0;
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = evaluate(x1)?.0;
            }
        }
        let mid = 0.5 * (lo + hi);
        if evaluate(mid)?.0 > best_rate {
            best_second = mid;
        }
    }

    let (sum_rate_bits, results) = evaluate(best_second)?;
    Ok(CoupledSplit {
        first_budget_bits: total_bits - best_second,
        second_budget_bits: best_second,
        tiers: results,
        sum_rate_bits,
    })
}

/// Residual of the high-SQNR allocation optimality condition per BS:
/// `(p_i + sigma_i^2) / (p_i + sigma_i^2 2^{C_i}) - beta`, where `p_i` is
/// the received signal power. Small wherever the rate is positive and
/// unclipped.
pub fn su_kkt_residual(cs: &ChannelState, alloc: &BackhaulAllocation, beta: f64) -> Vec<f64> {
    (0..cs.num_bs())
        .map(|i| {
            let p = cs.received_power(i);
            let s = cs.noise_var()[i];
            let two_c = (alloc.per_bs_bits()[i] * LN_2).exp();
            (p + s) / (p + s * two_c) - beta
        })
        .collect()
}
