use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qc_verify::config::{ConfigError, SuiteConfig, WORKERS_ENV};
use qc_verify::report::emit_report;

#[derive(Parser)]
#[command(name = "qc-verify", version, about = "Run the quaternionic contact verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run suites and print a report; exit 0 if every check passes, 1 otherwise.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Flat `key = value` file; flags override it
    #[arg(long)]
    config: Option<String>,
    /// Comma-separated: algebra, group-pointwise, group-integral, sphere, constants
    #[arg(long)]
    suites: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// Polynomial degree bound
    #[arg(long)]
    degree: Option<String>,
    /// Random functions or points per suite
    #[arg(long)]
    trials: Option<String>,
    /// Monte Carlo samples
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    fd_step: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    riem_tol: Option<String>,
    #[arg(long)]
    reeb_tol: Option<String>,
    #[arg(long)]
    mc_sigma: Option<String>,
    #[arg(long)]
    ratio_tol: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// json, csv or text
    #[arg(long)]
    format: Option<String>,
    /// Worker threads; also read from QC_VERIFY_WORKERS
    #[arg(long)]
    workers: Option<String>,
    /// Omit the timestamp and runtimes so identical runs give identical output
    #[arg(long)]
    no_timestamp: bool,
}

fn effective_config(a: &VerifyArgs) -> Result<SuiteConfig, ConfigError> {
    let mut cfg = match &a.config {
        Some(path) => SuiteConfig::from_file(path)?,
        None => SuiteConfig::default(),
    };
    cfg.apply_env_value(std::env::var(WORKERS_ENV).ok().as_deref())?;
    let flags = [
        ("n", &a.n),
        ("suites", &a.suites),
        ("degree", &a.degree),
        ("trials", &a.trials),
        ("samples", &a.samples),
        ("fd_step", &a.fd_step),
        ("tol", &a.tol),
        ("riem_tol", &a.riem_tol),
        ("reeb_tol", &a.reeb_tol),
        ("mc_sigma", &a.mc_sigma),
        ("ratio_tol", &a.ratio_tol),
        ("seed", &a.seed),
        ("format", &a.format),
        ("workers", &a.workers),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Verify(args) = cli.command;
    let cfg = match effective_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qc-verify: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match qc_verify::run(&cfg, !args.no_timestamp) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qc-verify: cannot start {} workers: {e}", cfg.workers);
            return ExitCode::from(2);
        }
    };
    print!("{}", emit_report(&report, cfg.format));
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
