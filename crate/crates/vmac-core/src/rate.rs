//! Achievable-rate and backhaul-usage expressions for the virtual
//! multiple-access channel: Wyner-Ziv and single-user compression usage,
//! successive-decoding per-user rates, weighted sum rates, and the cut-set
//! sum-capacity bound.
//!
//! All public rates are in bits per channel use; quantization noise levels
//! share the linear scale of the background noise variances.

use crate::linalg::{rank_one_accumulate, HermitianMatrix, LinalgError, C64};
use std::f64::consts::LN_2;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// A quantization noise level of zero makes the backhaul usage infinite.
    InfiniteBackhaulUsage { bs: usize },
    InvalidPermutation,
    NegativeWeight { index: usize },
    NegativeBackhaul { index: usize },
    /// Full rate-region enumeration is limited to 12 users.
    TooManyUsersForEnumeration { users: usize },
    BadDimension { what: &'static str, expected: usize, found: usize },
    BadValue { what: &'static str, index: usize },
    Linalg(LinalgError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InfiniteBackhaulUsage { bs } => {
                write!(f, "zero quantization noise at BS {bs} gives infinite backhaul usage")
            }
            ModelError::InvalidPermutation => write!(f, "decoding order is not a permutation"),
            ModelError::NegativeWeight { index } => write!(f, "negative weight at index {index}"),
            ModelError::NegativeBackhaul { index } => {
                write!(f, "negative backhaul rate at index {index}")
            }
            ModelError::TooManyUsersForEnumeration { users } => {
                write!(f, "rate-region enumeration limited to 12 users, got {users}")
            }
            ModelError::BadDimension { what, expected, found } => {
                write!(f, "{what}: expected length {expected}, found {found}")
            }
            ModelError::BadValue { what, index } => write!(f, "invalid {what} at index {index}"),
            ModelError::Linalg(e) => write!(f, "linear algebra failure: {e}"),
        }
    }
}

impl std::error::Error for ModelError {}

impl From<LinalgError> for ModelError {
    fn from(e: LinalgError) -> Self {
        ModelError::Linalg(e)
    }
}

/// Channel snapshot consumed by every rate formula: complex gains from each
/// user to each base station, fixed transmit powers, and per-BS background
/// noise variances (all linear scale).
#[derive(Debug, Clone)]
pub struct ChannelState {
    num_bs: usize,
    num_users: usize,
    /// Row-major `num_bs x num_users`; entry (i, j) is the channel from user
    /// j to BS i.
    gains: Vec<C64>,
    tx_power: Vec<f64>,
    noise_var: Vec<f64>,
}

impl ChannelState {
    pub fn new(
        num_bs: usize,
        num_users: usize,
        gains: Vec<C64>,
        tx_power: Vec<f64>,
        noise_var: Vec<f64>,
    ) -> Result<Self, ModelError> {
        if gains.len() != num_bs * num_users {
            return Err(ModelError::BadDimension {
                what: "channel matrix",
                expected: num_bs * num_users,
                found: gains.len(),
            });
        }
        if tx_power.len() != num_users {
            return Err(ModelError::BadDimension {
                what: "transmit powers",
                expected: num_users,
                found: tx_power.len(),
            });
        }
        if noise_var.len() != num_bs {
            return Err(ModelError::BadDimension {
                what: "noise variances",
                expected: num_bs,
                found: noise_var.len(),
            });
        }
        for (j, &p) in tx_power.iter().enumerate() {
            if !(p >= 0.0) || !p.is_finite() {
                return Err(ModelError::BadValue { what: "transmit power", index: j });
            }
        }
        for (i, &s) in noise_var.iter().enumerate() {
            if !(s > 0.0) || !s.is_finite() {
                return Err(ModelError::BadValue { what: "noise variance", index: i });
            }
        }
        for (k, g) in gains.iter().enumerate() {
            if !g.re.is_finite() || !g.im.is_finite() {
                return Err(ModelError::BadValue { what: "channel gain", index: k });
            }
        }
        Ok(Self { num_bs, num_users, gains, tx_power, noise_var })
    }

    /// Single-BS single-user convenience constructor.
    pub fn scalar(gain: C64, power: f64, noise_var: f64) -> Result<Self, ModelError> {
        Self::new(1, 1, vec![gain], vec![power], vec![noise_var])
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    #[inline]
    pub fn gain(&self, bs: usize, user: usize) -> C64 {
        self.gains[bs * self.num_users + user]
    }

    pub fn tx_power(&self) -> &[f64] {
        &self.tx_power
    }

    pub fn noise_var(&self) -> &[f64] {
        &self.noise_var
    }

    pub fn mean_noise(&self) -> f64 {
        self.noise_var.iter().sum::<f64>() / self.num_bs as f64
    }

    /// Channel column of user `j` (length `num_bs`).
    pub fn user_vector(&self, j: usize) -> Vec<C64> {
        (0..self.num_bs).map(|i| self.gain(i, j)).collect()
    }

    /// Total received signal power at BS `i`: `sum_j P_j |h_ij|^2`.
    pub fn received_power(&self, i: usize) -> f64 {
        (0..self.num_users).map(|j| self.tx_power[j] * self.gain(i, j).norm_sqr()).sum()
    }

    /// Received signal covariance `sum_j P_j h_j h_j^H` (no noise).
    pub fn signal_cov(&self) -> HermitianMatrix {
        let vecs: Vec<Vec<C64>> = (0..self.num_users).map(|j| self.user_vector(j)).collect();
        rank_one_accumulate(&vecs, &self.tx_power).expect("dimensions agree by construction")
    }

    /// Restriction to a subset of base stations (used for profiles where
    /// some BS has infinite quantization noise and is effectively cut off).
    pub fn restrict_bs(&self, keep: &[usize]) -> ChannelState {
        let mut gains = Vec::with_capacity(keep.len() * self.num_users);
        for &i in keep {
            for j in 0..self.num_users {
                gains.push(self.gain(i, j));
            }
        }
        ChannelState {
            num_bs: keep.len(),
            num_users: self.num_users,
            gains,
            tx_power: self.tx_power.clone(),
            noise_var: keep.iter().map(|&i| self.noise_var[i]).collect(),
        }
    }
}

/// Per-BS quantization noise levels (the diagonal of the quantization
/// covariance). `f64::INFINITY` marks a BS that forwards nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationProfile {
    levels: Vec<f64>,
}

impl QuantizationProfile {
    pub fn new(levels: Vec<f64>) -> Result<Self, ModelError> {
        for (i, &q) in levels.iter().enumerate() {
            if q.is_nan() || q < 0.0 {
                return Err(ModelError::BadValue { what: "quantization noise level", index: i });
            }
        }
        Ok(Self { levels })
    }

    pub fn uniform(num_bs: usize, q: f64) -> Self {
        Self { levels: vec![q; num_bs] }
    }

    /// `q_i = alpha * noise_i`.
    pub fn proportional(noise_var: &[f64], alpha: f64) -> Self {
        Self { levels: noise_var.iter().map(|&s| alpha * s).collect() }
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Indices of base stations with finite quantization noise.
    pub fn connected_bs(&self) -> Vec<usize> {
        (0..self.levels.len()).filter(|&i| self.levels[i].is_finite()).collect()
    }
}

/// Rates and backhaul usage for one channel snapshot.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub per_user_rates: Vec<f64>,
    pub sum_rate: f64,
    pub weighted_sum_rate: f64,
    pub wz_backhaul: f64,
    pub su_backhaul: f64,
}

fn check_profile<'a>(
    cs: &ChannelState,
    qp: &'a QuantizationProfile,
) -> Result<&'a [f64], ModelError> {
    if qp.len() != cs.num_bs {
        return Err(ModelError::BadDimension {
            what: "quantization profile",
            expected: cs.num_bs,
            found: qp.len(),
        });
    }
    Ok(qp.levels())
}

/// Restricts `(cs, q)` to the connected base stations.
fn connected_view(cs: &ChannelState, qp: &QuantizationProfile) -> (ChannelState, Vec<f64>) {
    let keep = qp.connected_bs();
    if keep.len() == cs.num_bs() {
        (cs.clone(), qp.levels().to_vec())
    } else {
        let q = keep.iter().map(|&i| qp.levels()[i]).collect();
        (cs.restrict_bs(&keep), q)
    }
}

/// Backhaul usage of Wyner-Ziv compression:
/// `log2 |H K_X H^H + Lambda_q + diag(sigma^2)| - log2 |Lambda_q|`.
pub fn wz_backhaul_usage(cs: &ChannelState, qp: &QuantizationProfile) -> Result<f64, ModelError> {
    let q = check_profile(cs, qp)?;
    for (i, &qi) in q.iter().enumerate() {
        if qi == 0.0 {
            return Err(ModelError::InfiniteBackhaulUsage { bs: i });
        }
    }
    let (cs, q) = connected_view(cs, qp);
    let mut m = cs.signal_cov();
    m.add_real_diag(cs.noise_var());
    m.add_real_diag(&q);
    let log_lambda: f64 = q.iter().map(|&v| v.ln()).sum();
    Ok((m.logdet()? - log_lambda) / LN_2)
}

/// Backhaul usage of per-BS single-user compression:
/// `sum_i log2(1 + (sum_j P_j |h_ij|^2 + sigma_i^2) / q_i)`.
pub fn su_backhaul_usage(cs: &ChannelState, qp: &QuantizationProfile) -> Result<f64, ModelError> {
    let q = check_profile(cs, qp)?;
    let mut total = 0.0;
    for (i, &qi) in q.iter().enumerate() {
        if qi == 0.0 {
            return Err(ModelError::InfiniteBackhaulUsage { bs: i });
        }
        if qi.is_finite() {
            total += (1.0 + (cs.received_power(i) + cs.noise_var()[i]) / qi).log2();
        }
    }
    Ok(total)
}

/// Per-user rates under successive decoding in the given order (the first
/// entry of `order` is decoded first and sees all later users as
/// interference). Returned rates are indexed by user, not by decode step.
pub fn sic_user_rates(
    cs: &ChannelState,
    qp: &QuantizationProfile,
    order: &[usize],
) -> Result<Vec<f64>, ModelError> {
    check_profile(cs, qp)?;
    let u = cs.num_users();
    if order.len() != u {
        return Err(ModelError::InvalidPermutation);
    }
    let mut seen = vec![false; u];
    for &j in order {
        if j >= u || seen[j] {
            return Err(ModelError::InvalidPermutation);
        }
        seen[j] = true;
    }

    let (cs, q) = connected_view(cs, qp);
    let mut combined_noise = cs.noise_var().to_vec();
    for (d, qi) in combined_noise.iter_mut().zip(&q) {
        *d += qi;
    }

    // suffix covariances: decode step k sees users order[k..] plus noise
    let mut m = HermitianMatrix::from_real_diag(&combined_noise);
    let mut logdets = vec![0.0; u + 1];
    logdets[u] = m.logdet()?;
    for k in (0..u).rev() {
        let j = order[k];
        m.add_scaled_outer(&cs.user_vector(j), cs.tx_power()[j])?;
        logdets[k] = m.logdet()?;
    }

    let mut rates = vec![0.0; u];
    for k in 0..u {
        rates[order[k]] = ((logdets[k] - logdets[k + 1]) / LN_2).max(0.0);
    }
    Ok(rates)
}

/// Decoding order for the given priority weights: ascending weight so the
/// highest-priority user is decoded last; ties break by user index.
pub fn ascending_weight_order(weights: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    idx.sort_by(|&a, &b| weights[a].partial_cmp(&weights[b]).unwrap().then(a.cmp(&b)));
    idx
}

/// Weighted sum rate at the successive-decoding corner point selected by the
/// weights (ascending decode order).
pub fn weighted_sum_rate(
    cs: &ChannelState,
    qp: &QuantizationProfile,
    weights: &[f64],
) -> Result<f64, ModelError> {
    if weights.len() != cs.num_users() {
        return Err(ModelError::BadDimension {
            what: "weights",
            expected: cs.num_users(),
            found: weights.len(),
        });
    }
    for (j, &w) in weights.iter().enumerate() {
        if w.is_nan() || w < 0.0 {
            return Err(ModelError::NegativeWeight { index: j });
        }
    }
    let order = ascending_weight_order(weights);
    let rates = sic_user_rates(cs, qp, &order)?;
    Ok(rates.iter().zip(weights).map(|(r, w)| r * w).sum())
}

/// Total decoded information `I(X; Yhat)` in bits per channel use.
pub fn sum_rate(cs: &ChannelState, qp: &QuantizationProfile) -> Result<f64, ModelError> {
    check_profile(cs, qp)?;
    let (cs, q) = connected_view(cs, qp);
    let mut combined = cs.noise_var().to_vec();
    for (d, qi) in combined.iter_mut().zip(&q) {
        *d += qi;
    }
    let denom = HermitianMatrix::from_real_diag(&combined).logdet()?;
    let mut m = cs.signal_cov();
    m.add_real_diag(&combined);
    Ok(((m.logdet()? - denom) / LN_2).max(0.0))
}

/// Cut-set sum-capacity upper bound: the minimum of the user-to-BS cut and
/// the backhaul cut.
pub fn cutset_bound(cs: &ChannelState, budget_bits: f64) -> f64 {
    debug_assert!(budget_bits >= 0.0);
    let denom = HermitianMatrix::from_real_diag(cs.noise_var())
        .logdet()
        .expect("noise variances are positive");
    let mut m = cs.signal_cov();
    m.add_real_diag(cs.noise_var());
    let air_cut = (m.logdet().expect("positive definite by construction") - denom) / LN_2;
    air_cut.min(budget_bits)
}

/// Diagnostic enumeration of every subset sum-rate constraint of the
/// achievable region; limited to 12 users. Each row is (user bitmask,
/// bound in bits).
pub fn rate_region_bounds(
    cs: &ChannelState,
    qp: &QuantizationProfile,
) -> Result<Vec<(u32, f64)>, ModelError> {
    check_profile(cs, qp)?;
    let u = cs.num_users();
    if u > 12 {
        return Err(ModelError::TooManyUsersForEnumeration { users: u });
    }
    let (cs, q) = connected_view(cs, qp);
    let mut combined = cs.noise_var().to_vec();
    for (d, qi) in combined.iter_mut().zip(&q) {
        *d += qi;
    }
    let denom = HermitianMatrix::from_real_diag(&combined).logdet()?;
    let mut out = Vec::with_capacity((1usize << u) - 1);
    for mask in 1u32..(1u32 << u) {
        let mut m = HermitianMatrix::from_real_diag(&combined);
        for j in 0..u {
            if mask & (1 << j) != 0 {
                m.add_scaled_outer(&cs.user_vector(j), cs.tx_power()[j])?;
            }
        }
        out.push((mask, (m.logdet()? - denom) / LN_2));
    }
    Ok(out)
}

/// Evaluates rates and both backhaul usages in one report.
pub fn rate_report(
    cs: &ChannelState,
    qp: &QuantizationProfile,
    weights: &[f64],
) -> Result<RateReport, ModelError> {
    let order = ascending_weight_order(weights);
    let per_user_rates = sic_user_rates(cs, qp, &order)?;
    let sum_rate = per_user_rates.iter().sum();
    let weighted = per_user_rates.iter().zip(weights).map(|(r, w)| r * w).sum();
    Ok(RateReport {
        per_user_rates,
        sum_rate,
        weighted_sum_rate: weighted,
        wz_backhaul: wz_backhaul_usage(cs, qp)?,
        su_backhaul: su_backhaul_usage(cs, qp)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scalar_cs() -> ChannelState {
        ChannelState::scalar(C64::new(1.0, 0.0), 1.0, 1.0).unwrap()
    }

    fn random_cs(rng: &mut ChaCha8Rng, l: usize, u: usize) -> ChannelState {
        let gains: Vec<C64> = (0..l * u)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let p: Vec<f64> = (0..u).map(|_| 0.2 + rng.gen::<f64>() * 2.0).collect();
        let s: Vec<f64> = (0..l).map(|_| 0.5 + rng.gen::<f64>()).collect();
        ChannelState::new(l, u, gains, p, s).unwrap()
    }

    #[test]
    fn wz_usage_scalar() {
        let qp = QuantizationProfile::new(vec![2.0 / 3.0]).unwrap();
        assert_relative_eq!(wz_backhaul_usage(&scalar_cs(), &qp).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn wz_usage_zero_channel() {
        let cs = ChannelState::scalar(C64::new(0.0, 0.0), 1.0, 1.0).unwrap();
        let qp = QuantizationProfile::new(vec![1.0]).unwrap();
        assert_relative_eq!(wz_backhaul_usage(&cs, &qp).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn wz_usage_diagonal_two_bs() {
        let gains = vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ];
        let cs = ChannelState::new(2, 2, gains, vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let qp = QuantizationProfile::uniform(2, 1.0);
        let expect = 2.0 * 3.0f64.log2();
        assert_relative_eq!(wz_backhaul_usage(&cs, &qp).unwrap(), expect, epsilon = 1e-12);
        // rows are decoupled here, so single-user compression pays the same
        assert_relative_eq!(su_backhaul_usage(&cs, &qp).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn su_usage_scalar() {
        let qp = QuantizationProfile::new(vec![2.0 / 3.0]).unwrap();
        assert_relative_eq!(su_backhaul_usage(&scalar_cs(), &qp).unwrap(), 2.0, epsilon = 1e-12);
        let cs0 = ChannelState::scalar(C64::new(0.0, 0.0), 1.0, 1.0).unwrap();
        let qp1 = QuantizationProfile::uniform(1, 1.0);
        assert_relative_eq!(su_backhaul_usage(&cs0, &qp1).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_quantization_noise_is_infinite_usage() {
        let qp = QuantizationProfile::new(vec![0.0]).unwrap();
        assert!(matches!(
            wz_backhaul_usage(&scalar_cs(), &qp),
            Err(ModelError::InfiniteBackhaulUsage { bs: 0 })
        ));
        assert!(matches!(
            su_backhaul_usage(&scalar_cs(), &qp),
            Err(ModelError::InfiniteBackhaulUsage { bs: 0 })
        ));
    }

    #[test]
    fn sic_scalar_rate() {
        let qp = QuantizationProfile::new(vec![2.0 / 3.0]).unwrap();
        let r = sic_user_rates(&scalar_cs(), &qp, &[0]).unwrap();
        assert_relative_eq!(r[0], 1.6f64.log2(), epsilon = 1e-12);
    }

    #[test]
    fn sic_zero_power_gives_zero_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut cs = random_cs(&mut rng, 3, 3);
        cs.tx_power = vec![0.0; 3];
        let qp = QuantizationProfile::uniform(3, 0.5);
        let r = sic_user_rates(&cs, &qp, &[2, 0, 1]).unwrap();
        assert!(r.iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn sic_invalid_permutation() {
        let qp = QuantizationProfile::uniform(1, 1.0);
        assert!(matches!(
            sic_user_rates(&scalar_cs(), &qp, &[0, 0]),
            Err(ModelError::InvalidPermutation)
        ));
    }

    #[test]
    fn sum_rate_is_order_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for l in [2usize, 4, 8] {
            let cs = random_cs(&mut rng, l, l);
            let qp = QuantizationProfile::uniform(l, 0.3);
            let fwd: Vec<usize> = (0..l).collect();
            let mut rev = fwd.clone();
            rev.reverse();
            let s1: f64 = sic_user_rates(&cs, &qp, &fwd).unwrap().iter().sum();
            let s2: f64 = sic_user_rates(&cs, &qp, &rev).unwrap().iter().sum();
            assert_relative_eq!(s1, s2, epsilon = 1e-9);
            assert_relative_eq!(s1, sum_rate(&cs, &qp).unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn weighted_sum_rate_equal_weights_is_sum_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cs = random_cs(&mut rng, 3, 3);
        let qp = QuantizationProfile::uniform(3, 0.7);
        let w = vec![1.0; 3];
        assert_relative_eq!(
            weighted_sum_rate(&cs, &qp, &w).unwrap(),
            sum_rate(&cs, &qp).unwrap(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn weighted_sum_rate_zero_weight_user() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cs = random_cs(&mut rng, 2, 2);
        let qp = QuantizationProfile::uniform(2, 0.5);
        // weight (0, 1): only user 1 counts, decoded last (clean)
        let w = vec![0.0, 1.0];
        let rates = sic_user_rates(&cs, &qp, &[0, 1]).unwrap();
        assert_relative_eq!(weighted_sum_rate(&cs, &qp, &w).unwrap(), rates[1], epsilon = 1e-12);
    }

    #[test]
    fn weighted_sum_rate_matches_telescoped_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cs = random_cs(&mut rng, 3, 3);
        let qp = QuantizationProfile::uniform(3, 0.4);
        let w = vec![0.3, 1.1, 0.6];
        let got = weighted_sum_rate(&cs, &qp, &w).unwrap();

        // telescoped: sum_i (mu_i - mu_{i-1}) log2|A_i + D| - mu_max log2|D|
        let order = ascending_weight_order(&w);
        let mut combined = cs.noise_var().to_vec();
        for (d, q) in combined.iter_mut().zip(qp.levels()) {
            *d += q;
        }
        let mut m = HermitianMatrix::from_real_diag(&combined);
        let mut expect = -w[order[order.len() - 1]] * m.logdet().unwrap() / LN_2;
        let mut prev_w = 0.0;
        let mut suffix_logs = vec![0.0; 3];
        for k in (0..3).rev() {
            let j = order[k];
            m.add_scaled_outer(&cs.user_vector(j), cs.tx_power()[j]).unwrap();
            suffix_logs[k] = m.logdet().unwrap() / LN_2;
        }
        for k in 0..3 {
            let wk = w[order[k]];
            expect += (wk - prev_w) * suffix_logs[k];
            prev_w = wk;
        }
        assert_relative_eq!(got, expect, epsilon = 1e-9);
    }

    #[test]
    fn weighted_sum_rate_rejects_negative_weight() {
        let qp = QuantizationProfile::uniform(1, 1.0);
        assert!(matches!(
            weighted_sum_rate(&scalar_cs(), &qp, &[-0.1]),
            Err(ModelError::NegativeWeight { index: 0 })
        ));
    }

    #[test]
    fn cutset_bound_cases() {
        assert_relative_eq!(cutset_bound(&scalar_cs(), 0.0), 0.0);
        assert_relative_eq!(cutset_bound(&scalar_cs(), 10.0), 1.0, epsilon = 1e-12);
        let cs = ChannelState::scalar(C64::new(3.0f64.sqrt(), 0.0), 1.0, 1.0).unwrap();
        assert_relative_eq!(cutset_bound(&cs, 1.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn wz_never_exceeds_su_usage() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let l = rng.gen_range(1..=5);
            let u = rng.gen_range(1..=5);
            let cs = random_cs(&mut rng, l, u);
            let qp = QuantizationProfile::uniform(l, 0.05 + rng.gen::<f64>());
            let wz = wz_backhaul_usage(&cs, &qp).unwrap();
            let su = su_backhaul_usage(&cs, &qp).unwrap();
            assert!(wz <= su + 1e-9, "wz {wz} > su {su}");
        }
    }

    #[test]
    fn usages_strictly_decrease_in_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let cs = random_cs(&mut rng, 3, 3);
            let base = 0.1 + rng.gen::<f64>();
            let qp = QuantizationProfile::uniform(3, base);
            for i in 0..3 {
                let mut bumped = qp.levels().to_vec();
                bumped[i] *= 1.01;
                let qb = QuantizationProfile::new(bumped).unwrap();
                assert!(
                    wz_backhaul_usage(&cs, &qb).unwrap() < wz_backhaul_usage(&cs, &qp).unwrap()
                );
                assert!(
                    su_backhaul_usage(&cs, &qb).unwrap() < su_backhaul_usage(&cs, &qp).unwrap()
                );
            }
        }
    }

    #[test]
    fn per_user_rates_nonincreasing_in_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..25 {
            let cs = random_cs(&mut rng, 3, 3);
            let qp = QuantizationProfile::uniform(3, 0.2 + rng.gen::<f64>());
            let order = [0, 1, 2];
            let r0 = sic_user_rates(&cs, &qp, &order).unwrap();
            for i in 0..3 {
                let mut bumped = qp.levels().to_vec();
                bumped[i] *= 1.05;
                let qb = QuantizationProfile::new(bumped).unwrap();
                let r1 = sic_user_rates(&cs, &qb, &order).unwrap();
                for (a, b) in r1.iter().zip(&r0) {
                    assert!(*a <= b + 1e-10);
                }
            }
        }
    }

    #[test]
    fn disconnected_bs_matches_restricted_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cs = random_cs(&mut rng, 3, 2);
        let qp = QuantizationProfile::new(vec![0.5, f64::INFINITY, 0.8]).unwrap();
        let restricted = cs.restrict_bs(&[0, 2]);
        let qr = QuantizationProfile::new(vec![0.5, 0.8]).unwrap();
        assert_relative_eq!(
            sum_rate(&cs, &qp).unwrap(),
            sum_rate(&restricted, &qr).unwrap(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            wz_backhaul_usage(&cs, &qp).unwrap(),
            wz_backhaul_usage(&restricted, &qr).unwrap(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            su_backhaul_usage(&cs, &qp).unwrap(),
            su_backhaul_usage(&restricted, &qr).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn region_enumeration_contains_sic_corner() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let cs = random_cs(&mut rng, 3, 3);
        let qp = QuantizationProfile::uniform(3, 0.5);
        let bounds = rate_region_bounds(&cs, &qp).unwrap();
        assert_eq!(bounds.len(), 7);
        let rates = sic_user_rates(&cs, &qp, &[0, 1, 2]).unwrap();
        for (mask, bound) in bounds {
            let subset_sum: f64 =
                (0..3).filter(|j| mask & (1 << j) != 0).map(|j| rates[j]).sum();
            assert!(subset_sum <= bound + 1e-9);
        }
    }

    #[test]
    fn region_enumeration_limit() {
        let cs = ChannelState::new(
            1,
            13,
            vec![C64::new(1.0, 0.0); 13],
            vec![1.0; 13],
            vec![1.0],
        )
        .unwrap();
        let qp = QuantizationProfile::uniform(1, 1.0);
        assert!(matches!(
            rate_region_bounds(&cs, &qp),
            Err(ModelError::TooManyUsersForEnumeration { users: 13 })
        ));
    }

    #[test]
    fn rate_report_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cs = random_cs(&mut rng, 3, 3);
        let qp = QuantizationProfile::uniform(3, 0.6);
        let report = rate_report(&cs, &qp, &[0.5, 1.0, 2.0]).unwrap();
        assert_relative_eq!(
            report.sum_rate,
            report.per_user_rates.iter().sum::<f64>(),
            epsilon = 1e-9
        );
        assert!(report.per_user_rates.iter().all(|&r| r >= 0.0));
        assert!(report.wz_backhaul <= report.su_backhaul + 1e-9);
    }
}
