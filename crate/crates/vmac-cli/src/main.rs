//! Command-line front end for the uplink C-RAN compression toolkit:
//! quantization optimization on channel instances, constant-gap
//! certification, and system-level simulation campaigns.

mod config;
mod errors;
mod gapcheck;
mod instance;
mod optimize;
mod simulate;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use config::ExperimentConfig;
use errors::CliError;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vmac_sim::config::{Policy, Scheme};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Baseline,
    Wz,
    Su,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Baseline => Scheme::Baseline,
            SchemeArg::Wz => Scheme::Wz,
            SchemeArg::Su => Scheme::Su,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Uniform,
    Approx,
    Optimized,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Policy {
        match p {
            PolicyArg::Uniform => Policy::Uniform,
            PolicyArg::Approx => Policy::Approx,
            PolicyArg::Optimized => Policy::Optimized,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "vmac",
    about = "Uplink C-RAN backhaul compression: rate optimization, gap certificates, and simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize quantization noise levels for one channel instance.
    Optimize {
        /// Plain-text instance file (L U header, channel rows, P, sigma^2, mu, C).
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long, value_enum, default_value = "approx")]
        policy: PolicyArg,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Constant-gap certificates for one instance or a random sweep.
    Gapcheck {
        #[arg(long, conflicts_with = "sweep")]
        instance: Option<PathBuf>,
        /// Number of random instances to certify.
        #[arg(long)]
        sweep: Option<usize>,
        #[arg(long, value_enum, default_value = "wz")]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        l_min: usize,
        #[arg(long, default_value_t = 4)]
        l_max: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run rate-CDF campaigns from an experiment configuration.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Restrict to one scheme.
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
        /// Restrict to one policy.
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        /// Also write per-slot diagnostics.
        #[arg(long)]
        verbose: bool,
    },
    /// Per-cell sum rate versus backhaul budget for every scheme/policy.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_toml(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    if let Some(s) = seed {
        cfg.sim.seed = s;
    }
    Ok(cfg)
}

fn load_instance(path: &Path) -> Result<instance::Instance, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    instance::parse_instance(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Optimize { instance, scheme, policy, out } => {
            let inst = load_instance(&instance)?;
            let outcome = optimize::run(&inst, scheme.into(), policy.into())?;
            optimize::write_report(&out, &outcome)
        }
        Command::Gapcheck { instance, sweep, scheme, seed, l_min, l_max, out } => {
            let csv = match (instance, sweep) {
                (Some(path), None) => {
                    let inst = load_instance(&path)?;
                    let cert = gapcheck::certificate_for(&inst, scheme.into())?;
                    gapcheck::single_csv(&cert)
                }
                (None, Some(count)) => {
                    if l_min < 1 || l_max < l_min {
                        return Err(CliError::Usage(
                            "the BS count range must satisfy 1 <= l-min <= l-max".into(),
                        ));
                    }
                    let spec = gapcheck::SweepSpec {
                        count,
                        l_min,
                        l_max,
                        seed,
                        ..gapcheck::SweepSpec::default()
                    };
                    gapcheck::sweep_csv(scheme.into(), &spec)?
                }
                _ => {
                    return Err(CliError::Usage(
                        "gapcheck needs exactly one of --instance or --sweep".into(),
                    ))
                }
            };
            std::fs::create_dir_all(&out)?;
            vmac_sim::csvout::write_atomic(&out.join("gapcheck.csv"), &csv)?;
            Ok(())
        }
        Command::Simulate { config, seed, out, scheme, policy, verbose } => {
            let cfg = load_config(&config, seed)?;
            let out_dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
            let schemes: Vec<Scheme> = match scheme {
                Some(s) => vec![s.into()],
                None if !cfg.sweep.schemes.is_empty() => cfg.sweep.schemes.clone(),
                None => vec![cfg.sim.scheme],
            };
            let policies: Vec<Policy> = match policy {
                Some(p) => vec![p.into()],
                None if !cfg.sweep.policies.is_empty() => cfg.sweep.policies.clone(),
                None => vec![cfg.sim.policy],
            };
            simulate::cmd_simulate(&cfg, &schemes, &policies, &out_dir, verbose)
        }
        Command::Sweep { config, seed, out } => {
            let cfg = load_config(&config, seed)?;
            let out_dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
            simulate::cmd_sweep(&cfg, &out_dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
