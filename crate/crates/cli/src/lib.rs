//! Command-line driver for the `qc-core` verification suites.

pub mod config;
pub mod report;
pub mod suites;

use config::SuiteConfig;
use report::Report;

/// Runs the configured suites on a pool of `cfg.workers` threads.
pub fn run(cfg: &SuiteConfig, timestamp: bool) -> Result<Report, rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    let checks = pool.install(|| suites::run_suites(cfg, timestamp));
    let now = timestamp.then(|| {
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs())
    });
    Ok(Report::assemble(cfg.echo(), checks, now))
}
