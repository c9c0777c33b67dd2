//! Deterministic random-instance generation for property sweeps: generic
//! channels, high-SQNR channels, and diagonally dominant constructions.

use crate::linalg::{rank_one_accumulate, HermitianMatrix, C64};
use crate::rate::ChannelState;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

fn complex_normal<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re / 2f64.sqrt(), im / 2f64.sqrt())
}

/// Random channel with unit-variance complex Gaussian gains, transmit powers
/// log-uniform over `power_span_db` centered at 0 dB, and unit noise.
pub fn random_channel<R: Rng>(rng: &mut R, l: usize, u: usize, power_span_db: f64) -> ChannelState {
    let gains: Vec<C64> = (0..l * u).map(|_| complex_normal(rng)).collect();
    let power: Vec<f64> = (0..u)
        .map(|_| 10f64.powf((rng.gen::<f64>() - 0.5) * power_span_db / 10.0))
        .collect();
    ChannelState::new(l, u, gains, power, vec![1.0; l]).expect("generated instance is valid")
}

/// Random channel rescaled so every BS sees at least `min_snr_db` of
/// received signal over its background noise.
pub fn high_sqnr_channel<R: Rng>(
    rng: &mut R,
    l: usize,
    u: usize,
    power_span_db: f64,
    min_snr_db: f64,
) -> ChannelState {
    let cs = random_channel(rng, l, u, power_span_db);
    let min_snr = (0..l)
        .map(|i| cs.received_power(i) / cs.noise_var()[i])
        .fold(f64::INFINITY, f64::min);
    let target = 10f64.powf(min_snr_db / 10.0);
    let boost = (target / min_snr).max(1.0);
    let power: Vec<f64> = cs.tx_power().iter().map(|&p| p * boost).collect();
    let gains = (0..l * u)
        .map(|k| cs.gain(k / u, k % u))
        .collect();
    ChannelState::new(l, u, gains, power, cs.noise_var().to_vec()).expect("still valid")
}

/// High-SQNR channel with the per-BS received SNRs confined to
/// `[snr_lo_db, snr_hi_db]` by row rescaling. Keeping the spread tight keeps
/// every BS inside the high-SQNR regime after quantization at moderate
/// per-BS backhaul rates.
pub fn balanced_high_sqnr_channel<R: Rng>(
    rng: &mut R,
    l: usize,
    u: usize,
    snr_lo_db: f64,
    snr_hi_db: f64,
) -> ChannelState {
    let cs = random_channel(rng, l, u, 6.0);
    let mut gains = vec![C64::new(0.0, 0.0); l * u];
    for i in 0..l {
        let target_db = snr_lo_db + rng.gen::<f64>() * (snr_hi_db - snr_lo_db);
        let target = 10f64.powf(target_db / 10.0) * cs.noise_var()[i];
        let scale = (target / cs.received_power(i)).sqrt();
        for j in 0..u {
            gains[i * u + j] = cs.gain(i, j) * scale;
        }
    }
    ChannelState::new(l, u, gains, cs.tx_power().to_vec(), cs.noise_var().to_vec())
        .expect("rescaled instance is valid")
}

/// Cellular-like high-SQNR channel: every BS hears one dominant associated
/// user, with cross links `isolation_db` weaker on average, and per-BS
/// received SNRs confined to `[snr_lo_db, snr_hi_db]`. This is the regime
/// where the received covariance is well conditioned and proportional
/// quantization noise is near optimal.
pub fn cellular_high_sqnr_channel<R: Rng>(
    rng: &mut R,
    l: usize,
    snr_lo_db: f64,
    snr_hi_db: f64,
    isolation_db: f64,
) -> ChannelState {
    let cross = 10f64.powf(-isolation_db / 20.0);
    let mut gains = vec![C64::new(0.0, 0.0); l * l];
    for i in 0..l {
        for j in 0..l {
            let g = complex_normal(rng);
            gains[i * l + j] = if i == j { g * (1.0 / g.norm().max(1e-9)) } else { g * cross };
        }
    }
    let power = vec![1.0; l];
    let noise = vec![1.0; l];
    let base = ChannelState::new(l, l, gains, power, noise).expect("valid");
    let mut scaled = vec![C64::new(0.0, 0.0); l * l];
    for i in 0..l {
        let target_db = snr_lo_db + rng.gen::<f64>() * (snr_hi_db - snr_lo_db);
        let target = 10f64.powf(target_db / 10.0) * base.noise_var()[i];
        let scale = (target / base.received_power(i)).sqrt();
        for j in 0..l {
            scaled[i * l + j] = base.gain(i, j) * scale;
        }
    }
    ChannelState::new(l, l, scaled, base.tx_power().to_vec(), base.noise_var().to_vec())
        .expect("rescaled instance is valid")
}

/// Random Hermitian positive definite matrix (Gram form plus identity).
pub fn random_spd<R: Rng>(rng: &mut R, n: usize) -> HermitianMatrix {
    let vecs: Vec<Vec<C64>> =
        (0..n + 1).map(|_| (0..n).map(|_| complex_normal(rng)).collect()).collect();
    let mut m = rank_one_accumulate(&vecs, &vec![1.0; n + 1]).expect("consistent dims");
    m.add_real_diag(&vec![0.2; n]);
    m
}

/// Hermitian positive definite matrix that is strictly diagonally dominant
/// with row-dominance ratio at least `kappa_min`; returns the matrix and its
/// measured ratio.
pub fn sdd_hermitian<R: Rng>(rng: &mut R, n: usize, kappa_min: f64) -> (HermitianMatrix, f64) {
    assert!(kappa_min > 1.0);
    let mut m = HermitianMatrix::zeros(n);
    for i in 0..n {
        m.set_sym(i, i, C64::new(0.5 + 2.0 * rng.gen::<f64>(), 0.0));
        for j in (i + 1)..n {
            m.set_sym(i, j, complex_normal(rng));
        }
    }
    // scale the off-diagonal block so every row meets the dominance target
    let mut worst = f64::INFINITY;
    for i in 0..n {
        let offsum: f64 =
            (0..n).filter(|&j| j != i).map(|j| m.entry(i, j).norm()).sum();
        if offsum > 0.0 {
            worst = worst.min(m.entry(i, i).re / offsum);
        }
    }
    if worst.is_finite() && worst < kappa_min {
        let shrink = worst / kappa_min;
        for i in 0..n {
            for j in (i + 1)..n {
                m.set_sym(i, j, m.entry(i, j) * shrink);
            }
        }
    }
    (m.clone(), crate::gap::kappa_of(&m))
}

/// Channel whose received covariance `H K_X H^H + diag(sigma^2)` has a
/// diagonal-dominance ratio within `[kappa_lo, kappa_hi]`, found by scanning
/// the off-diagonal channel scale. The ratio is not monotone in that scale,
/// so draws that never enter the window are resampled.
pub fn kappa_sdd_channel<R: Rng>(
    rng: &mut R,
    l: usize,
    kappa_lo: f64,
    kappa_hi: f64,
) -> (ChannelState, f64) {
    assert!(1.0 < kappa_lo && kappa_lo < kappa_hi);
    loop {
        let diag: Vec<C64> = (0..l)
            .map(|_| {
                let g = complex_normal(rng);
                g * (2.0 / g.norm().max(1e-6))
            })
            .collect();
        let off: Vec<C64> = (0..l * l).map(|_| complex_normal(rng)).collect();
        let power: Vec<f64> = (0..l).map(|_| 0.5 + rng.gen::<f64>() * 2.0).collect();

        let build = |c: f64| -> ChannelState {
            let gains: Vec<C64> = (0..l * l)
                .map(|k| {
                    let (i, j) = (k / l, k % l);
                    if i == j {
                        diag[i]
                    } else {
                        off[k] * c
                    }
                })
                .collect();
            ChannelState::new(l, l, gains, power.clone(), vec![1.0; l]).expect("valid")
        };

        // fine logarithmic scan: kappa falls from infinity as c grows, and
        // the ~8% step cannot leap across the whole target window
        let mut c = 1e-4;
        while c < 1e4 {
            let cs = build(c);
            let mut cov = cs.signal_cov();
            cov.add_real_diag(cs.noise_var());
            let kappa = crate::gap::kappa_of(&cov);
            if kappa >= kappa_lo && kappa <= kappa_hi {
                return (cs, kappa);
            }
            c *= 1.08;
        }
    }
}
