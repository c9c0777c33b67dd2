//! Quantization-noise-level optimization for Wyner-Ziv compression.
//!
//! The weighted sum rate is a difference of concave functions of the noise
//! levels. Replacing the subtracted term with its tangent minorant turns
//! each step into a convex program over the noise levels; alternating that
//! inner solve with the closed-form minorant refresh climbs monotonically to
//! a stationary point. A log-barrier interior method with Newton steps
//! handles the inner problem. At high SQNR the optimum is proportional to
//! the background noise, which the bisection in [`approx_alpha`] exploits.

use crate::linalg::HermitianMatrix;
use crate::rate::{weighted_sum_rate, wz_backhaul_usage, ChannelState, QuantizationProfile};
use crate::solver::{bisect_decreasing, weight_decomposition, SolveError};
use std::f64::consts::LN_2;

pub use crate::solver::SolveError as WzSolveError;

#[derive(Debug, Clone)]
pub struct AcoSettings {
    pub max_outer_iters: usize,
    /// Stop when the outer objective improves by less than this (bits).
    pub objective_tol_bits: f64,
    /// Target KKT stationarity residual of the inner barrier solve (nats).
    pub inner_tol: f64,
    /// Smallest allowed quantization noise level.
    pub q_floor: f64,
}

impl Default for AcoSettings {
    fn default() -> Self {
        Self { max_outer_iters: 100, objective_tol_bits: 1e-4, inner_tol: 1e-8, q_floor: 1e-12 }
    }
}

impl AcoSettings {
    /// Default settings with the noise floor scaled to the channel
    /// (`q_floor = 1e-12 * mean noise`).
    pub fn for_channel(cs: &ChannelState) -> Self {
        Self { q_floor: 1e-12 * cs.mean_noise(), ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct AcoTraceRow {
    pub iteration: usize,
    pub objective_bits: f64,
    pub usage_bits: f64,
    pub q: Vec<f64>,
}

/// Per-iteration evidence of monotone convergence, plus the backhaul dual
/// recovered from the final inner solve.
#[derive(Debug, Clone, Default)]
pub struct AcoTrace {
    pub rows: Vec<AcoTraceRow>,
    pub backhaul_dual: f64,
}

#[derive(Debug, Clone)]
pub struct InnerSolution {
    pub profile: QuantizationProfile,
    pub objective_nats: f64,
    /// Multiplier of the sum-backhaul constraint at the barrier optimum.
    pub backhaul_dual: f64,
    /// Infinity norm of the KKT stationarity residual (nats).
    pub stationarity_inf: f64,
    pub newton_iters: usize,
}

/// Surplus of the log-det tangent bound: `log|S| + Tr(S^{-1} O) - n - log|O|`
/// in nats. Nonnegative, zero exactly when the matrices coincide.
pub fn fenchel_gap(
    omega: &HermitianMatrix,
    sigma: &HermitianMatrix,
) -> Result<f64, SolveError> {
    let n = omega.dim();
    if sigma.dim() != n {
        return Err(SolveError::Model(crate::rate::ModelError::BadDimension {
            what: "fenchel gap matrices",
            expected: n,
            found: sigma.dim(),
        }));
    }
    let log_omega = omega.logdet()?;
    let chol_sigma = sigma.cholesky()?;
    let log_sigma = chol_sigma.logdet();
    let mut trace = 0.0;
    for j in 0..n {
        let x = chol_sigma.solve(&omega.column(j));
        trace += x[j].re;
    }
    Ok(log_sigma + trace - n as f64 - log_omega)
}

/// Closed-form optimizer of the minorant block: the combined quantization
/// and background noise `diag(sigma^2) + Lambda_q`.
pub fn closed_form_sigma(cs: &ChannelState, qp: &QuantizationProfile) -> HermitianMatrix {
    debug_assert_eq!(qp.len(), cs.num_bs());
    let diag: Vec<f64> =
        cs.noise_var().iter().zip(qp.levels()).map(|(s, q)| s + q).collect();
    HermitianMatrix::from_real_diag(&diag)
}

/// Suffix signal covariances plus background noise, ordered by decode step:
/// entry `k` is `sum_{m >= k} P_(m) h_(m) h_(m)^H + diag(sigma^2)`.
fn suffix_matrices(cs: &ChannelState, order: &[usize]) -> Vec<HermitianMatrix> {
    let u = order.len();
    let mut out = vec![HermitianMatrix::zeros(0); u];
    let mut m = HermitianMatrix::from_real_diag(cs.noise_var());
    for k in (0..u).rev() {
        let j = order[k];
        m.add_scaled_outer(&cs.user_vector(j), cs.tx_power()[j])
            .expect("channel vectors have BS dimension");
        out[k] = m.clone();
    }
    out
}

/// Solves a real symmetric positive definite system in place; returns None
/// when a pivot fails.
fn solve_real_spd(n: usize, a: &mut [f64], b: &mut [f64]) -> Option<()> {
    // in-place Cholesky in the lower triangle
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let ljj = d.sqrt();
        a[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / ljj;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= a[k * n + i] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    Some(())
}

struct InnerProblem<'a> {
    cs: &'a ChannelState,
    /// Suffix covariances G_k; G_0 also forms the backhaul constraint.
    suffix: Vec<HermitianMatrix>,
    diffs: Vec<f64>,
    top: f64,
    sigma_inv_diag: Vec<f64>,
    /// Constraint level in nats.
    cap_nats: f64,
    floor: f64,
}

impl InnerProblem<'_> {
    fn objective(&self, q: &[f64]) -> Result<f64, SolveError> {
        let mut f = 0.0;
        for (k, g) in self.suffix.iter().enumerate() {
            if self.diffs[k] > 0.0 {
                let mut m = g.clone();
                m.add_real_diag(q);
                f += self.diffs[k] * m.logdet()?;
            }
        }
        for i in 0..q.len() {
            f -= self.top * (self.cs.noise_var()[i] + q[i]) * self.sigma_inv_diag[i];
        }
        Ok(f)
    }

    fn constraint(&self, q: &[f64]) -> Result<f64, SolveError> {
        let mut m = self.suffix[0].clone();
        m.add_real_diag(q);
        let log_lambda: f64 = q.iter().map(|&v| v.ln()).sum();
        Ok(m.logdet()? - log_lambda)
    }

    fn barrier_value(&self, q: &[f64], mu: f64) -> Result<f64, SolveError> {
        let g = self.constraint(q)?;
        let slack = self.cap_nats - g;
        if slack <= 0.0 {
            return Err(SolveError::NumericalFailure { detail: "left feasible set".into() });
        }
        let mut phi = -self.objective(q)? - mu * slack.ln();
        for &qi in q {
            let d = qi - self.floor;
            if d <= 0.0 {
                return Err(SolveError::NumericalFailure { detail: "hit noise floor".into() });
            }
            phi -= mu * d.ln();
        }
        Ok(phi)
    }

    fn is_strictly_feasible(&self, q: &[f64]) -> bool {
        if q.iter().any(|&qi| qi <= self.floor) {
            return false;
        }
        match self.constraint(q) {
            Ok(g) => g < self.cap_nats,
            Err(_) => false,
        }
    }
}

/// Maximizes the minorized weighted-sum-rate objective over the noise
/// levels, subject to the Wyner-Ziv sum-backhaul constraint, with a fixed
/// diagonal minorant matrix. This is the convex step of the alternating
/// scheme.
pub fn inner_convex_solve(
    cs: &ChannelState,
    weights: &[f64],
    sigma: &HermitianMatrix,
    budget_bits: f64,
    settings: &AcoSettings,
    warm_start: Option<&[f64]>,
) -> Result<InnerSolution, SolveError> {
    let l = cs.num_bs();
    if sigma.dim() != l {
        return Err(SolveError::Model(crate::rate::ModelError::BadDimension {
            what: "minorant matrix",
            expected: l,
            found: sigma.dim(),
        }));
    }
    if !(budget_bits > 0.0) {
        return Err(SolveError::Infeasible { detail: "budget must be positive".into() });
    }
    let decomp = weight_decomposition(weights)?;
    if decomp.order.len() != cs.num_users() {
        return Err(SolveError::Model(crate::rate::ModelError::BadDimension {
            what: "weights",
            expected: cs.num_users(),
            found: decomp.order.len(),
        }));
    }
    let sigma_inv_diag: Vec<f64> = (0..l)
        .map(|i| {
            let d = sigma.entry(i, i).re;
            debug_assert!(d > 0.0, "minorant matrix must be positive diagonal");
            1.0 / d
        })
        .collect();

    let problem = InnerProblem {
        cs,
        suffix: suffix_matrices(cs, &decomp.order),
        diffs: decomp.diffs.clone(),
        top: decomp.top,
        sigma_inv_diag,
        cap_nats: budget_bits * LN_2,
        floor: settings.q_floor,
    };

    // strictly feasible start: double until the usage constraint has slack
    let mut q: Vec<f64> = match warm_start {
        Some(w) => w.iter().map(|&v| v.max(settings.q_floor * 2.0)).collect(),
        None => vec![cs.mean_noise().max(settings.q_floor * 2.0); l],
    };
    let mut grow = 0;
    while !problem.is_strictly_feasible(&q) {
        for v in &mut q {
            *v *= 2.0;
        }
        grow += 1;
        if grow > 400 {
            return Err(SolveError::Infeasible {
                detail: "could not reach the feasible region by inflating q".into(),
            });
        }
    }

    let mut mu: f64 = 1.0;
    let mut total_newton = 0usize;
    let n_constraints = (l + 1) as f64;
    loop {
        let stage_tol = (1e-3 * mu).max(0.5 * settings.inner_tol);
        for _ in 0..80 {
            total_newton += 1;
            // inverses of the shifted suffix covariances
            let mut inv_cache: Vec<Option<HermitianMatrix>> = vec![None; problem.suffix.len()];
            for (k, g) in problem.suffix.iter().enumerate() {
                if k == 0 || problem.diffs[k] > 0.0 {
                    let mut m = g.clone();
                    m.add_real_diag(&q);
                    inv_cache[k] = Some(m.inverse()?);
                }
            }
            let p0 = inv_cache[0].as_ref().unwrap();

            let mut grad_f = vec![0.0; l];
            let mut hess_f = vec![0.0; l * l];
            for (k, inv) in inv_cache.iter().enumerate() {
                let d = problem.diffs[k];
                if d > 0.0 {
                    let p = inv.as_ref().unwrap();
                    for i in 0..l {
                        grad_f[i] += d * p.entry(i, i).re;
                        for j in 0..l {
                            hess_f[i * l + j] -= d * p.entry(i, j).norm_sqr();
                        }
                    }
                }
            }
            for i in 0..l {
                grad_f[i] -= problem.top * problem.sigma_inv_diag[i];
            }

            let g_val = problem.constraint(&q)?;
            let slack = problem.cap_nats - g_val;
            if slack <= 0.0 {
                return Err(SolveError::NumericalFailure {
                    detail: "iterate left the feasible region".into(),
                });
            }
            let grad_g: Vec<f64> =
                (0..l).map(|i| p0.entry(i, i).re - 1.0 / q[i]).collect();

            // gradient and Hessian of the barrier
            let mut grad = vec![0.0; l];
            let mut hess = vec![0.0; l * l];
            for i in 0..l {
                grad[i] =
                    -grad_f[i] + mu / slack * grad_g[i] - mu / (q[i] - problem.floor);
                for j in 0..l {
                    let hg = -p0.entry(i, j).norm_sqr()
                        + if i == j { 1.0 / (q[i] * q[i]) } else { 0.0 };
                    hess[i * l + j] = -hess_f[i * l + j]
                        + mu / slack * hg
                        + mu / (slack * slack) * grad_g[i] * grad_g[j];
                }
                hess[i * l + i] += mu / ((q[i] - problem.floor) * (q[i] - problem.floor));
            }

            let grad_inf = grad.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            if grad_inf <= stage_tol {
                break;
            }

            let mut step: Vec<f64> = grad.iter().map(|&v| -v).collect();
            if solve_real_spd(l, &mut hess, &mut step).is_none() {
                // fall back to a safeguarded gradient step
                for (s, &gv) in step.iter_mut().zip(&grad) {
                    *s = -gv;
                }
            }

            let slope: f64 = grad.iter().zip(&step).map(|(g, s)| g * s).sum();
            if slope >= 0.0 {
                break; // not a descent direction; numerically converged
            }
            let mut t = 1.0;
            let mut accepted = false;
            if -slope < 1e-6 {
                // quadratic-convergence region: objective differences are
                // below float resolution, take the largest feasible step
                for _ in 0..60 {
                    let trial: Vec<f64> =
                        q.iter().zip(&step).map(|(&qi, &s)| qi + t * s).collect();
                    if problem.is_strictly_feasible(&trial) {
                        q = trial;
                        accepted = true;
                        break;
                    }
                    t *= 0.5;
                }
            } else {
                let phi0 = problem.barrier_value(&q, mu)?;
                for _ in 0..60 {
                    let trial: Vec<f64> =
                        q.iter().zip(&step).map(|(&qi, &s)| qi + t * s).collect();
                    if problem.is_strictly_feasible(&trial) {
                        if let Ok(phi) = problem.barrier_value(&trial, mu) {
                            if phi <= phi0 + 1e-4 * t * slope {
                                q = trial;
                                accepted = true;
                                break;
                            }
                        }
                    }
                    t *= 0.5;
                }
            }
            if !accepted {
                break;
            }
        }
        if n_constraints * mu < settings.inner_tol {
            break;
        }
        mu *= 0.2;
    }

    let slack = problem.cap_nats - problem.constraint(&q)?;
    let dual = mu / slack;

    // first-order optimality, measured as the KKT residual with the
    // least-squares multiplier of the (near-)active backhaul constraint;
    // this strips the barrier-conditioned component along the constraint
    // normal that plain Newton cannot resolve in floating point
    let stationarity;
    {
        let mut grad_f = vec![0.0; l];
        let mut grad_g = vec![0.0; l];
        for (k, g) in problem.suffix.iter().enumerate() {
            if k == 0 || problem.diffs[k] > 0.0 {
                let mut m = g.clone();
                m.add_real_diag(&q);
                let inv = m.inverse()?;
                for i in 0..l {
                    if problem.diffs[k] > 0.0 {
                        grad_f[i] += problem.diffs[k] * inv.entry(i, i).re;
                    }
                    if k == 0 {
                        grad_g[i] = inv.entry(i, i).re - 1.0 / q[i];
                    }
                }
            }
        }
        for i in 0..l {
            grad_f[i] -= problem.top * problem.sigma_inv_diag[i];
        }
        let gg: f64 = grad_g.iter().map(|v| v * v).sum();
        let active = slack <= 1e-6 * problem.cap_nats.abs().max(1.0);
        let lambda = if active && gg > 0.0 {
            (grad_f.iter().zip(&grad_g).map(|(a, b)| a * b).sum::<f64>() / gg).max(0.0)
        } else {
            0.0
        };
        // the floor multiplier absorbs the push at bound-active coordinates
        // and is negligible elsewhere
        stationarity = (0..l).fold(0.0f64, |acc, i| {
            let nu = mu / (q[i] - problem.floor);
            acc.max((grad_f[i] - lambda * grad_g[i] + nu).abs())
        });
    }

    Ok(InnerSolution {
        objective_nats: problem.objective(&q)?,
        profile: QuantizationProfile::new(q).expect("solver keeps q positive"),
        backhaul_dual: dual,
        stationarity_inf: stationarity,
        newton_iters: total_newton,
    })
}

/// Alternating convex optimization of the quantization noise levels for the
/// weighted sum rate under the Wyner-Ziv sum-backhaul constraint. Starts
/// from `q = gamma * 1` with `gamma` the mean background noise, alternates
/// the convex inner solve with the closed-form minorant refresh, and stops
/// once the objective improvement drops below tolerance. The trace
/// objective is nondecreasing.
pub fn aco_optimize(
    cs: &ChannelState,
    weights: &[f64],
    budget_bits: f64,
    settings: &AcoSettings,
) -> Result<(QuantizationProfile, AcoTrace), SolveError> {
    if !(budget_bits > 0.0) {
        return Err(SolveError::Infeasible { detail: "budget must be positive".into() });
    }
    let gamma = cs.mean_noise();
    let mut q = vec![gamma; cs.num_bs()];
    // first minorant block is gamma * I
    let mut sigma = HermitianMatrix::from_real_diag(&vec![gamma; cs.num_bs()]);
    let mut trace = AcoTrace::default();
    let mut prev_obj = f64::NEG_INFINITY;
    for iteration in 1..=settings.max_outer_iters {
        let inner = inner_convex_solve(cs, weights, &sigma, budget_bits, settings, Some(&q))?;
        q = inner.profile.levels().to_vec();
        trace.backhaul_dual = inner.backhaul_dual;
        let qp = QuantizationProfile::new(q.clone()).expect("positive levels");
        sigma = closed_form_sigma(cs, &qp);
        let objective_bits = weighted_sum_rate(cs, &qp, weights)?;
        let usage_bits = wz_backhaul_usage(cs, &qp)?;
        trace.rows.push(AcoTraceRow { iteration, objective_bits, usage_bits, q: q.clone() });
        if objective_bits - prev_obj < settings.objective_tol_bits {
            break;
        }
        prev_obj = objective_bits;
    }
    Ok((QuantizationProfile::new(q).expect("positive levels"), trace))
}

/// Wyner-Ziv backhaul usage with noise levels proportional to the
/// background noise, `q_i = alpha * sigma_i^2`; strictly decreasing in
/// `alpha`.
pub fn cwz_of_alpha(cs: &ChannelState, alpha: f64) -> f64 {
    assert!(alpha > 0.0, "proportionality constant must be positive");
    let qp = QuantizationProfile::proportional(cs.noise_var(), alpha);
    wz_backhaul_usage(cs, &qp).expect("positive q gives finite usage")
}

/// Proportional-noise bisection: doubles `alpha` from 1 until the usage
/// drops below the budget, then bisects the usage equation to `tol` bits.
/// Returns the proportionality constant and the resulting profile.
pub fn approx_alpha(cs: &ChannelState, budget_bits: f64, tol_bits: f64) -> (f64, QuantizationProfile) {
    assert!(budget_bits > 0.0, "budget must be positive");
    let mut hi = 1.0;
    let mut guard = 0;
    while cwz_of_alpha(cs, hi) > budget_bits {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            break;
        }
    }
    let alpha = bisect_decreasing(|a| cwz_of_alpha(cs, a), budget_bits, 0.0, hi, tol_bits, 500);
    (alpha, QuantizationProfile::proportional(cs.noise_var(), alpha))
}

/// Component-wise residual of the sum-rate optimality condition
/// `(1-lambda) diag((H K_X H^H + D)^{-1}) - D^{-1} + lambda Lambda_q^{-1}`
/// with `D = diag(sigma^2) + Lambda_q`. Near zero at a sum-rate optimal
/// profile whose backhaul dual is `lambda`; at high SQNR the root is
/// `q_i = lambda / (1 - lambda) * sigma_i^2`.
pub fn wz_sum_rate_kkt_residual(
    cs: &ChannelState,
    qp: &QuantizationProfile,
    lambda: f64,
) -> Result<Vec<f64>, SolveError> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(SolveError::BadDualRange { value: lambda });
    }
    let l = cs.num_bs();
    if qp.len() != l {
        return Err(SolveError::Model(crate::rate::ModelError::BadDimension {
            what: "quantization profile",
            expected: l,
            found: qp.len(),
        }));
    }
    for (i, &qi) in qp.levels().iter().enumerate() {
        if !(qi > 0.0) || !qi.is_finite() {
            return Err(SolveError::Model(crate::rate::ModelError::BadValue {
                what: "quantization noise level",
                index: i,
            }));
        }
    }
    let combined: Vec<f64> =
        cs.noise_var().iter().zip(qp.levels()).map(|(s, q)| s + q).collect();
    let mut m = cs.signal_cov();
    m.add_real_diag(&combined);
    let inv = m.inverse()?;
    Ok((0..l)
        .map(|i| {
            (1.0 - lambda) * inv.entry(i, i).re - 1.0 / combined[i]
                + lambda / qp.levels()[i]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scalar_cs() -> ChannelState {
        ChannelState::scalar(C64::new(1.0, 0.0), 1.0, 1.0).unwrap()
    }

    #[test]
    fn fenchel_gap_zero_at_equality() {
        let m = HermitianMatrix::from_real_diag(&[1.5, 0.7, 2.0]);
        assert_relative_eq!(fenchel_gap(&m, &m).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fenchel_gap_worked_value() {
        let omega = HermitianMatrix::identity(2);
        let sigma = HermitianMatrix::from_real_diag(&[2.0, 2.0]);
        assert_relative_eq!(
            fenchel_gap(&omega, &sigma).unwrap(),
            2.0 * 2.0f64.ln() - 1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn fenchel_gap_nonnegative_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=4);
            let omega = crate::synth::random_spd(&mut rng, n);
            let sigma = crate::synth::random_spd(&mut rng, n);
            assert!(fenchel_gap(&omega, &sigma).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn closed_form_sigma_values() {
        let cs = ChannelState::new(
            2,
            1,
            vec![C64::new(1.0, 0.0), C64::new(0.5, 0.0)],
            vec![1.0],
            vec![1.0, 2.0],
        )
        .unwrap();
        let qp = QuantizationProfile::new(vec![3.0, 4.0]).unwrap();
        let s = closed_form_sigma(&cs, &qp);
        assert_relative_eq!(s.entry(0, 0).re, 4.0);
        assert_relative_eq!(s.entry(1, 1).re, 6.0);
        let q0 = QuantizationProfile::new(vec![0.0, 0.0]).unwrap();
        let s0 = closed_form_sigma(&cs, &q0);
        assert_relative_eq!(s0.entry(0, 0).re, 1.0);
        assert_relative_eq!(s0.entry(1, 1).re, 2.0);
    }

    #[test]
    fn closed_form_sigma_minimizes_the_tangent_block() {
        // grid search over diagonal candidates confirms the closed form
        // minimizes log|S| + Tr(S^{-1} (diag(sigma^2) + Lambda_q))
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let cs = crate::synth::random_channel(&mut rng, 2, 2, 10.0);
        let qp = QuantizationProfile::new(vec![0.7, 1.9]).unwrap();
        let target: Vec<f64> =
            cs.noise_var().iter().zip(qp.levels()).map(|(s, q)| s + q).collect();
        let objective = |d0: f64, d1: f64| {
            d0.ln() + d1.ln() + target[0] / d0 + target[1] / d1
        };
        let closed = closed_form_sigma(&cs, &qp);
        let closed_val = objective(closed.entry(0, 0).re, closed.entry(1, 1).re);
        let mut best = f64::INFINITY;
        for a in 1..=400 {
            for b in 1..=400 {
                best = best.min(objective(0.02 * a as f64, 0.02 * b as f64));
            }
        }
        assert!(closed_val <= best + 1e-9, "closed form {closed_val} vs grid {best}");
    }

    #[test]
    fn cwz_scalar_value_and_monotonicity() {
        let cs = scalar_cs();
        assert_relative_eq!(cwz_of_alpha(&cs, 1.0), 3.0f64.log2(), epsilon = 1e-12);
        let mut prev = f64::INFINITY;
        for k in 0..30 {
            let a = 0.01 * 1.6f64.powi(k);
            let v = cwz_of_alpha(&cs, a);
            assert!(v < prev);
            prev = v;
        }
        // vanishes as alpha grows
        assert!(cwz_of_alpha(&cs, 1e6) < 1e-4);
    }

    #[test]
    fn approx_alpha_scalar_closed_form() {
        let cs = scalar_cs();
        let (alpha, qp) = approx_alpha(&cs, 2.0, 1e-12);
        assert_relative_eq!(alpha, 2.0 / 3.0, epsilon = 1e-9);
        assert_relative_eq!(qp.levels()[0], 2.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn approx_alpha_large_budget_reaches_cut_set() {
        let cs = scalar_cs();
        let (_, qp) = approx_alpha(&cs, 500.0, 1e-9);
        let rate = crate::rate::sum_rate(&cs, &qp).unwrap();
        assert_relative_eq!(rate, 1.0, epsilon = 1e-6); // log2(1 + 1)
    }

    #[test]
    fn approx_alpha_symmetric_two_bs() {
        let gains = vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ];
        let cs = ChannelState::new(2, 2, gains, vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let (alpha, _) = approx_alpha(&cs, 4.0, 1e-12);
        assert_relative_eq!(alpha, 2.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn approx_alpha_meets_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let cs = crate::synth::random_channel(&mut rng, 3, 3, 30.0);
            let budget = 0.5 + rng.gen::<f64>() * 20.0;
            let (_, qp) = approx_alpha(&cs, budget, 1e-9);
            let usage = wz_backhaul_usage(&cs, &qp).unwrap();
            assert!((usage - budget).abs() <= 1e-9, "residual {}", usage - budget);
        }
    }

    #[test]
    fn kkt_residual_high_sqnr_proportional_root() {
        let cs = ChannelState::scalar(C64::new(1e3, 0.0), 1.0, 1.0).unwrap(); // P|h|^2 = 1e6
        let lambda = 0.5;
        let qp = QuantizationProfile::new(vec![lambda / (1.0 - lambda)]).unwrap();
        let r = wz_sum_rate_kkt_residual(&cs, &qp, lambda).unwrap();
        assert!(r[0].abs() <= 1e-4, "residual {}", r[0]);
    }

    #[test]
    fn kkt_residual_large_q_direction() {
        // at lambda = 0 and large q the residual is -S/((S + D) D):
        // strictly negative, the combined-noise term dominating
        let cs = scalar_cs();
        for q in [1e3, 1e6, 1e9] {
            let qp = QuantizationProfile::new(vec![q]).unwrap();
            let r = wz_sum_rate_kkt_residual(&cs, &qp, 0.0).unwrap();
            assert!(r[0] < 0.0);
            let d = 1.0 + q;
            assert_relative_eq!(r[0], -1.0 / ((1.0 + d) * d), max_relative = 1e-9);
        }
    }

    #[test]
    fn kkt_residual_rejects_bad_dual() {
        let qp = QuantizationProfile::new(vec![1.0]).unwrap();
        assert!(wz_sum_rate_kkt_residual(&scalar_cs(), &qp, 1.0).is_err());
        assert!(wz_sum_rate_kkt_residual(&scalar_cs(), &qp, -0.1).is_err());
    }

    #[test]
    fn inner_solve_unconstrained_stationarity() {
        // huge budget: the constraint is inactive and the unconstrained
        // maximizer is recovered (gradient of the objective near zero);
        // a large minorant matrix keeps that maximizer interior
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cs = crate::synth::random_channel(&mut rng, 2, 2, 10.0);
        let qp0 = QuantizationProfile::uniform(2, 20.0);
        let sigma = closed_form_sigma(&cs, &qp0);
        let settings = AcoSettings::default();
        let sol =
            inner_convex_solve(&cs, &[1.0, 1.0], &sigma, 1e6, &settings, None).unwrap();
        assert!(
            sol.stationarity_inf <= settings.inner_tol,
            "stationarity {} with dual {}",
            sol.stationarity_inf,
            sol.backhaul_dual
        );
        assert!(sol.backhaul_dual < 1e-9);
    }

    #[test]
    fn aco_trace_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let cs = crate::synth::random_channel(&mut rng, 3, 3, 30.0);
            let w: Vec<f64> = (0..3).map(|_| 0.2 + rng.gen::<f64>()).collect();
            let (_, trace) =
                aco_optimize(&cs, &w, 6.0, &AcoSettings::default()).unwrap();
            for pair in trace.rows.windows(2) {
                assert!(
                    pair[1].objective_bits >= pair[0].objective_bits - 1e-9,
                    "trace decreased: {} -> {}",
                    pair[0].objective_bits,
                    pair[1].objective_bits
                );
            }
        }
    }

    #[test]
    fn aco_scalar_matches_constraint_boundary() {
        // for a single user the rate decreases in q, so the optimum sits on
        // the backhaul constraint, same as the proportional solution
        let cs = scalar_cs();
        let settings = AcoSettings {
            objective_tol_bits: 1e-9,
            inner_tol: 1e-10,
            ..AcoSettings::default()
        };
        let (qp, trace) = aco_optimize(&cs, &[1.0], 2.0, &settings).unwrap();
        assert_relative_eq!(qp.levels()[0], 2.0 / 3.0, epsilon = 1e-5);
        let last = trace.rows.last().unwrap();
        assert_relative_eq!(last.objective_bits, 1.6f64.log2(), epsilon = 1e-6);
        assert!(last.usage_bits <= 2.0 + 1e-9);
    }
}
