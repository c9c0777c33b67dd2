//! Constant-gap certificates: proportional quantization noise measured
//! against the cut-set sum-capacity bound, for Wyner-Ziv and single-user
//! compression, plus the diagonal-dominance machinery behind the
//! single-user bound.

use crate::linalg::HermitianMatrix;
use crate::rate::{cutset_bound, sum_rate, ChannelState, QuantizationProfile};
use crate::solver::{bisect_decreasing, SolveError};
use crate::wz::cwz_of_alpha;
use std::f64::consts::LN_2;

const ALPHA_BISECT_TOL_BITS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompressionScheme {
    WynerZiv,
    SingleUser,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapRegime {
    /// Budget large enough for noise-level quantization (`alpha = 1`).
    LargeBudget,
    /// Budget binds; `alpha > 1` solves the usage equation.
    SmallBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateStatus {
    Pass,
    Fail,
    /// The diagonal-dominance precondition does not hold.
    Inapplicable,
}

/// One constant-gap check: the chosen proportionality constant, the cut-set
/// bound, the rate achieved with `q_i = alpha * sigma_i^2`, and the
/// theoretical gap bound the measurement is held against.
#[derive(Debug, Clone)]
pub struct GapCertificate {
    pub scheme: CompressionScheme,
    pub regime: GapRegime,
    pub alpha: f64,
    /// Diagonal-dominance ratio of the received covariance (single-user
    /// certificates only; `+inf` for diagonal covariances).
    pub kappa: Option<f64>,
    pub cutset_bits: f64,
    pub achieved_bits: f64,
    pub gap_bits: f64,
    pub bound_bits: f64,
    pub status: CertificateStatus,
}

fn received_cov(cs: &ChannelState) -> HermitianMatrix {
    let mut m = cs.signal_cov();
    m.add_real_diag(cs.noise_var());
    m
}

/// Largest `kappa` for which every row's diagonal magnitude is at least
/// `kappa` times its off-diagonal absolute row sum; `+inf` when all rows
/// have zero off-diagonal mass.
pub fn kappa_of(m: &HermitianMatrix) -> f64 {
    let n = m.dim();
    let mut kappa = f64::INFINITY;
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| m.entry(i, j).norm()).sum();
        if off > 0.0 {
            kappa = kappa.min(m.entry(i, i).re.abs() / off);
        }
    }
    kappa
}

/// Lower bound on the log-determinant of a `kappa`-strictly diagonally
/// dominant matrix: `n ln(1 - 1/kappa) + sum_i ln Psi_ii` (nats).
pub fn ostrowski_lower_bound(m: &HermitianMatrix, kappa: f64) -> Result<f64, SolveError> {
    if !(kappa > 1.0) {
        return Err(SolveError::BadDualRange { value: kappa });
    }
    let n = m.dim();
    let factor = if kappa.is_infinite() { 0.0 } else { (1.0 - 1.0 / kappa).ln() };
    let mut acc = n as f64 * factor;
    for i in 0..n {
        acc += m.entry(i, i).re.ln();
    }
    Ok(acc)
}

fn finish_certificate(
    cs: &ChannelState,
    budget_bits: f64,
    scheme: CompressionScheme,
    regime: GapRegime,
    alpha: f64,
    kappa: Option<f64>,
    bound_bits: f64,
) -> GapCertificate {
    let qp = QuantizationProfile::proportional(cs.noise_var(), alpha);
    let achieved_bits = sum_rate(cs, &qp).expect("proportional profile is positive");
    let cutset_bits = cutset_bound(cs, budget_bits);
    let gap_bits = cutset_bits - achieved_bits;
    let applicable = kappa.map_or(true, |k| k > 1.0);
    let status = if !applicable {
        CertificateStatus::Inapplicable
    } else if gap_bits >= -1e-9 && gap_bits < bound_bits {
        CertificateStatus::Pass
    } else {
        CertificateStatus::Fail
    };
    GapCertificate {
        scheme,
        regime,
        alpha,
        kappa,
        cutset_bits,
        achieved_bits,
        gap_bits,
        bound_bits,
        status,
    }
}

fn solve_alpha_small_budget<F: Fn(f64) -> f64>(
    usage: F,
    budget_bits: f64,
) -> Result<f64, SolveError> {
    // usage(1) > budget in the small-budget regime; double until bracketed
    let mut hi = 2.0;
    let mut guard = 0;
    while usage(hi) > budget_bits {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            return Err(SolveError::NumericalFailure {
                detail: "usage bisection failed to bracket".into(),
            });
        }
    }
    Ok(bisect_decreasing(usage, budget_bits, 1.0, hi, ALPHA_BISECT_TOL_BITS, 500))
}

/// Wyner-Ziv constant-gap certificate: quantization noise at the background
/// noise level when the budget affords it, otherwise scaled up until the
/// compression usage meets the budget; the gap to the cut-set bound stays
/// below one bit per BS.
pub fn wz_gap_certificate(
    cs: &ChannelState,
    budget_bits: f64,
) -> Result<GapCertificate, SolveError> {
    if !(budget_bits > 0.0) {
        return Err(SolveError::Infeasible { detail: "budget must be positive".into() });
    }
    let l = cs.num_bs() as f64;
    let mut doubled = cs.signal_cov();
    let twice: Vec<f64> = cs.noise_var().iter().map(|s| 2.0 * s).collect();
    doubled.add_real_diag(&twice);
    let noise_logdet = HermitianMatrix::from_real_diag(cs.noise_var()).logdet()?;
    let threshold_bits = (doubled.logdet()? - noise_logdet) / LN_2;

    let (regime, alpha) = if budget_bits >= threshold_bits {
        (GapRegime::LargeBudget, 1.0)
    } else {
        let alpha = solve_alpha_small_budget(|a| cwz_of_alpha(cs, a), budget_bits)?;
        debug_assert!(alpha > 1.0, "small-budget regime forces alpha > 1");
        (GapRegime::SmallBudget, alpha)
    };
    Ok(finish_certificate(cs, budget_bits, CompressionScheme::WynerZiv, regime, alpha, None, l))
}

/// Single-user compression usage with `q_i = alpha * sigma_i^2`.
pub fn csu_of_alpha(cs: &ChannelState, alpha: f64) -> f64 {
    assert!(alpha > 0.0);
    let qp = QuantizationProfile::proportional(cs.noise_var(), alpha);
    crate::rate::su_backhaul_usage(cs, &qp).expect("positive q gives finite usage")
}

/// Single-user constant-gap certificate, valid when the received covariance
/// is strictly diagonally dominant; the theoretical bound grows with the
/// dominance ratio as `L (1 + log2(kappa / (kappa - 1)))`.
pub fn su_gap_certificate(
    cs: &ChannelState,
    budget_bits: f64,
) -> Result<GapCertificate, SolveError> {
    if !(budget_bits > 0.0) {
        return Err(SolveError::Infeasible { detail: "budget must be positive".into() });
    }
    let l = cs.num_bs() as f64;
    let cov = received_cov(cs);
    let kappa = kappa_of(&cov);

    // regime threshold uses the per-BS diagonal usage
    let threshold_bits: f64 = (0..cs.num_bs())
        .map(|i| {
            let s = cs.noise_var()[i];
            ((cs.received_power(i) + 2.0 * s) / s).log2()
        })
        .sum();

    let (regime, alpha) = if budget_bits >= threshold_bits {
        (GapRegime::LargeBudget, 1.0)
    } else {
        let alpha = solve_alpha_small_budget(|a| csu_of_alpha(cs, a), budget_bits)?;
        debug_assert!(alpha > 1.0);
        (GapRegime::SmallBudget, alpha)
    };

    let bound_bits = if kappa.is_infinite() {
        l
    } else if kappa > 1.0 {
        l * (1.0 + (kappa / (kappa - 1.0)).log2())
    } else {
        f64::INFINITY
    };
    Ok(finish_certificate(
        cs,
        budget_bits,
        CompressionScheme::SingleUser,
        regime,
        alpha,
        Some(kappa),
        bound_bits,
    ))
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
    fn kappa_examples() {
        assert!(kappa_of(&HermitianMatrix::from_real_diag(&[3.0, 4.0])).is_infinite());
        let mut m = HermitianMatrix::from_real_diag(&[2.0, 2.0]);
        m.set_sym(0, 1, C64::new(1.0, 0.0));
        assert_relative_eq!(kappa_of(&m), 2.0);
    }

    #[test]
    fn ostrowski_worked_example() {
        let mut m = HermitianMatrix::from_real_diag(&[2.0, 2.0]);
        m.set_sym(0, 1, C64::new(1.0, 0.0));
        let bound = ostrowski_lower_bound(&m, 2.0).unwrap();
        assert_relative_eq!(bound, 0.0, epsilon = 1e-12);
        assert!(m.logdet().unwrap() >= bound);
        assert_relative_eq!(m.logdet().unwrap(), 3.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn ostrowski_diagonal_is_exact() {
        let m = HermitianMatrix::from_real_diag(&[1.5, 0.4, 7.0]);
        let bound = ostrowski_lower_bound(&m, f64::INFINITY).unwrap();
        assert_relative_eq!(bound, m.logdet().unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn ostrowski_rejects_small_kappa() {
        let m = HermitianMatrix::identity(2);
        assert!(ostrowski_lower_bound(&m, 1.0).is_err());
    }

    #[test]
    fn ostrowski_holds_on_random_dominant_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let n = rng.gen_range(2..=5);
            let kmin = 1.2 + rng.gen::<f64>() * 5.0;
            let (m, kappa) = crate::synth::sdd_hermitian(&mut rng, n, kmin);
            assert!(kappa > 1.0);
            let bound = ostrowski_lower_bound(&m, kappa).unwrap();
            assert!(
                m.logdet().unwrap() >= bound - 1e-10,
                "logdet {} below bound {bound}",
                m.logdet().unwrap()
            );
        }
    }

    #[test]
    fn wz_certificate_scalar_large_budget() {
        let cert = wz_gap_certificate(&scalar_cs(), 10.0).unwrap();
        assert_eq!(cert.regime, GapRegime::LargeBudget);
        assert_relative_eq!(cert.alpha, 1.0);
        assert_relative_eq!(cert.achieved_bits, 1.5f64.log2(), epsilon = 1e-12);
        assert_relative_eq!(cert.cutset_bits, 1.0, epsilon = 1e-12);
        assert_relative_eq!(cert.gap_bits, 1.0 - 1.5f64.log2(), epsilon = 1e-12);
        assert_eq!(cert.status, CertificateStatus::Pass);
    }

    #[test]
    fn wz_certificate_scalar_small_budget() {
        let cert = wz_gap_certificate(&scalar_cs(), 1.0).unwrap();
        assert_eq!(cert.regime, GapRegime::SmallBudget);
        assert_relative_eq!(cert.alpha, 2.0, epsilon = 1e-7);
        assert_relative_eq!(cert.achieved_bits, (4.0f64 / 3.0).log2(), epsilon = 1e-7);
        assert_relative_eq!(cert.gap_bits, 1.0 - (4.0f64 / 3.0).log2(), epsilon = 1e-7);
        // analytic small-budget identity: usage - rate = L log2(1 + 1/alpha)
        let usage = cwz_of_alpha(&scalar_cs(), cert.alpha);
        assert_relative_eq!(
            usage - cert.achieved_bits,
            (1.0 + 1.0 / cert.alpha).log2(),
            epsilon = 1e-9
        );
        assert_eq!(cert.status, CertificateStatus::Pass);
    }

    #[test]
    fn wz_certificate_random_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let l = rng.gen_range(2..=4);
            let cs = crate::synth::random_channel(&mut rng, l, l, 60.0);
            let air = cutset_bound(&cs, f64::MAX);
            let budget = 0.1 + rng.gen::<f64>() * 2.0 * air.max(1.0);
            let cert = wz_gap_certificate(&cs, budget).unwrap();
            assert_eq!(cert.status, CertificateStatus::Pass, "cert {cert:?}");
            assert!(cert.achieved_bits <= cert.cutset_bits + 1e-9);
            if cert.regime == GapRegime::SmallBudget {
                assert!(cert.alpha > 1.0);
            }
        }
    }

    #[test]
    fn su_certificate_scalar_matches_wz() {
        let su = su_gap_certificate(&scalar_cs(), 10.0).unwrap();
        let wz = wz_gap_certificate(&scalar_cs(), 10.0).unwrap();
        assert_relative_eq!(su.achieved_bits, wz.achieved_bits, epsilon = 1e-12);
        assert_relative_eq!(su.gap_bits, wz.gap_bits, epsilon = 1e-12);
        assert!(su.kappa.unwrap().is_infinite());
        assert_relative_eq!(su.bound_bits, 1.0);
        assert_eq!(su.status, CertificateStatus::Pass);
    }

    #[test]
    fn su_certificate_diagonal_channel() {
        let gains = vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.5, 0.0),
        ];
        let cs = ChannelState::new(2, 2, gains, vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let cert = su_gap_certificate(&cs, 3.0).unwrap();
        assert!(cert.kappa.unwrap().is_infinite());
        assert_relative_eq!(cert.bound_bits, 2.0);
        assert!(cert.gap_bits < 2.0);
        assert_eq!(cert.status, CertificateStatus::Pass);
    }

    #[test]
    fn su_certificate_sweep_on_dominant_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let l = rng.gen_range(2..=4);
            let (cs, kappa) = crate::synth::kappa_sdd_channel(&mut rng, l, 1.5, 10.0);
            assert!(kappa > 1.0);
            let air = cutset_bound(&cs, f64::MAX);
            let budget = 0.1 + rng.gen::<f64>() * 2.0 * air.max(1.0);
            let cert = su_gap_certificate(&cs, budget).unwrap();
            assert_eq!(cert.status, CertificateStatus::Pass, "cert {cert:?}");
            assert!(cert.gap_bits < cert.bound_bits);
        }
    }

    #[test]
    fn su_certificate_inapplicable_when_not_dominant() {
        // three identical user columns: each off-diagonal row sum is twice
        // the signal diagonal, so kappa < 1
        let gains = vec![C64::new(1.0, 0.0); 9];
        let cs =
            ChannelState::new(3, 3, gains, vec![5.0; 3], vec![0.1; 3]).unwrap();
        let cert = su_gap_certificate(&cs, 4.0).unwrap();
        assert!(cert.kappa.unwrap() <= 1.0);
        assert_eq!(cert.status, CertificateStatus::Inapplicable);
    }
}
