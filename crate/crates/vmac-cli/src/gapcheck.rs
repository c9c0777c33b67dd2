//! `gapcheck` subcommand: constant-gap certificates for one instance or a
//! random sweep, written as CSV with one row per instance.

use crate::errors::CliError;
use crate::instance::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vmac_core::gap::{
    su_gap_certificate, wz_gap_certificate, CertificateStatus, GapCertificate, GapRegime,
};
use vmac_core::rate::cutset_bound;
use vmac_core::synth;
use vmac_sim::config::Scheme;

pub struct SweepSpec {
    pub count: usize,
    pub l_min: usize,
    pub l_max: usize,
    pub seed: u64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub power_span_db: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            count: 1000,
            l_min: 2,
            l_max: 4,
            seed: 1,
            kappa_min: 1.5,
            kappa_max: 10.0,
            power_span_db: 60.0,
        }
    }
}

pub const CSV_HEADER: &str =
    "scheme,regime,alpha,kappa,cutset_bits,achieved_bits,gap_bits,bound_bits,status\n";

fn csv_row(cert: &GapCertificate) -> String {
    let scheme = match cert.scheme {
        vmac_core::gap::CompressionScheme::WynerZiv => "wz",
        vmac_core::gap::CompressionScheme::SingleUser => "su",
    };
    let regime = match cert.regime {
        GapRegime::LargeBudget => "large",
        GapRegime::SmallBudget => "small",
    };
    let status = match cert.status {
        CertificateStatus::Pass => "pass",
        CertificateStatus::Fail => "fail",
        CertificateStatus::Inapplicable => "inapplicable",
    };
    let kappa = cert.kappa.map(|k| format!("{k:.9}")).unwrap_or_default();
    format!(
        "{scheme},{regime},{:.9},{kappa},{:.9},{:.9},{:.9},{:.9},{status}\n",
        cert.alpha, cert.cutset_bits, cert.achieved_bits, cert.gap_bits, cert.bound_bits
    )
}

pub fn certificate_for(inst: &Instance, scheme: Scheme) -> Result<GapCertificate, CliError> {
    match scheme {
        Scheme::Wz => Ok(wz_gap_certificate(&inst.channel, inst.budget_bits)?),
        Scheme::Su => Ok(su_gap_certificate(&inst.channel, inst.budget_bits)?),
        Scheme::Baseline => {
            Err(CliError::Usage("gap certificates apply to the wz and su schemes".into()))
        }
    }
}

/// Random certificate sweep; the CSV is header-only for a zero count.
pub fn sweep_csv(scheme: Scheme, spec: &SweepSpec) -> Result<String, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = String::from(CSV_HEADER);
    for _ in 0..spec.count {
        let l = rng.gen_range(spec.l_min..=spec.l_max);
        let cs = match scheme {
            Scheme::Wz => synth::random_channel(&mut rng, l, l, spec.power_span_db),
            Scheme::Su => synth::kappa_sdd_channel(&mut rng, l, spec.kappa_min, spec.kappa_max).0,
            Scheme::Baseline => {
                return Err(CliError::Usage(
                    "gap certificates apply to the wz and su schemes".into(),
                ))
            }
        };
        let air = cutset_bound(&cs, f64::MAX);
        let budget = 0.1 + rng.gen::<f64>() * 2.0 * air.max(1.0);
        let cert = match scheme {
            Scheme::Wz => wz_gap_certificate(&cs, budget)?,
            Scheme::Su => su_gap_certificate(&cs, budget)?,
            Scheme::Baseline => unreachable!(),
        };
        out.push_str(&csv_row(&cert));
    }
    Ok(out)
}

pub fn single_csv(cert: &GapCertificate) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push_str(&csv_row(cert));
    out
}
