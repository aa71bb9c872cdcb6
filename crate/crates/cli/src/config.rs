//! Effective run configuration: defaults, then a flat `key = value` file,
//! then the worker environment variable, then command-line flags.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Overrides the worker count from the file or the default.
pub const WORKERS_ENV: &str = "QC_VERIFY_WORKERS";

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("cannot read config file {path}: {reason}")]
    Io { path: String, reason: String },
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue { key: key.into(), value: value.into(), reason: reason.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Algebra,
    GroupPointwise,
    GroupIntegral,
    Sphere,
    Constants,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Algebra, Suite::GroupPointwise, Suite::GroupIntegral, Suite::Sphere, Suite::Constants];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::GroupPointwise => "group-pointwise",
            Suite::GroupIntegral => "group-integral",
            Suite::Sphere => "sphere",
            Suite::Constants => "constants",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (expected one of algebra, group-pointwise, group-integral, sphere, constants)"))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format `{s}` (expected json, csv or text)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        })
    }
}

/// Everything a run depends on.
///
/// | key | default | meaning |
/// |---|---|---|
/// | `n` | 2 | quaternionic dimension |
/// | `suites` | all | comma-separated suite names |
/// | `degree` | 3 | polynomial degree bound |
/// | `trials` | 20 | random functions or points per suite |
/// | `samples` | 100000 | Monte Carlo samples |
/// | `fd_step` | 1e-4 | finite-difference step on the sphere |
/// | `tol` | 1e-4 | sub-Laplacian, route and Hessian tolerance |
/// | `riem_tol` | 1e-5 | Riemannian Laplacian tolerance |
/// | `reeb_tol` | 1e-8 | `ξ_s² f = -f` tolerance |
/// | `mc_sigma` | 3 | allowed standard errors for Monte Carlo |
/// | `ratio_tol` | 0.02 | relative tolerance of the sphere ratios |
/// | `seed` | 20100611 | master seed |
/// | `format` | json | `json`, `csv` or `text` |
/// | `workers` | available cores | worker threads |
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub n: usize,
    pub suites: Vec<Suite>,
    pub degree: u32,
    pub trials: usize,
    pub samples: usize,
    pub fd_step: f64,
    pub tol: f64,
    pub riem_tol: f64,
    pub reeb_tol: f64,
    pub mc_sigma: f64,
    pub ratio_tol: f64,
    pub seed: u64,
    pub format: Format,
    pub workers: usize,
}

pub const KEYS: [&str; 14] = [
    "n", "suites", "degree", "trials", "samples", "fd_step", "tol", "riem_tol", "reeb_tol", "mc_sigma", "ratio_tol",
    "seed", "format", "workers",
];

/// Smallest accepted sample count; the group integrals need at least this many.
pub const MIN_SAMPLES: usize = qc_core::integral::MC_MIN_SAMPLES;

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: 2,
            suites: Suite::ALL.to_vec(),
            degree: 3,
            trials: 20,
            samples: 100_000,
            fd_step: 1e-4,
            tol: 1e-4,
            riem_tol: 1e-5,
            reeb_tol: 1e-8,
            mc_sigma: 3.0,
            ratio_tol: 0.02,
            seed: 20_100_611,
            format: Format::Json,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

fn positive_int<T: FromStr + PartialEq + Default>(key: &str, value: &str) -> Result<T, ConfigError> {
    let v: T = value.parse().map_err(|_| bad(key, value, "expected a positive integer"))?;
    if v == T::default() {
        return Err(bad(key, value, "must be positive"));
    }
    Ok(v)
}

fn positive_float(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = value.parse().map_err(|_| bad(key, value, "expected a number"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(bad(key, value, "must be positive and finite"));
    }
    Ok(v)
}

pub fn parse_suites(value: &str) -> Result<Vec<Suite>, ConfigError> {
    let mut out: Vec<Suite> = Vec::new();
    for part in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let s: Suite = part.parse().map_err(|e: String| bad("suites", value, e))?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out.sort();
    Ok(out)
}

impl SuiteConfig {
    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "n" => self.n = positive_int(key, value)?,
            "suites" => self.suites = parse_suites(value)?,
            "degree" => self.degree = positive_int(key, value)?,
            "trials" => self.trials = positive_int(key, value)?,
            "samples" => {
                let s: usize = positive_int(key, value)?;
                if s < MIN_SAMPLES {
                    return Err(bad(key, value, format!("must be at least {MIN_SAMPLES}")));
                }
                self.samples = s;
            }
            "fd_step" => {
                let h = positive_float(key, value)?;
                if h >= 0.1 {
                    return Err(bad(key, value, "must be below 0.1"));
                }
                self.fd_step = h;
            }
            "tol" => self.tol = positive_float(key, value)?,
            "riem_tol" => self.riem_tol = positive_float(key, value)?,
            "reeb_tol" => self.reeb_tol = positive_float(key, value)?,
            "mc_sigma" => self.mc_sigma = positive_float(key, value)?,
            "ratio_tol" => self.ratio_tol = positive_float(key, value)?,
            "seed" => self.seed = value.parse().map_err(|_| bad(key, value, "expected an unsigned integer"))?,
            "format" => self.format = value.parse().map_err(|e: String| bad(key, value, e))?,
            "workers" => self.workers = positive_int(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Apply a flat `key = value` text; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.to_string() })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn from_file(path: &str) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.to_string(), reason: e.to_string() })?;
        let mut c = SuiteConfig::default();
        c.apply_text(&text)?;
        Ok(c)
    }

    /// The worker count from [`WORKERS_ENV`], if set.
    pub fn apply_env_value(&mut self, value: Option<&str>) -> Result<(), ConfigError> {
        if let Some(v) = value {
            self.workers = positive_int(WORKERS_ENV, v)?;
        }
        Ok(())
    }

    /// Values that determine the report; `workers` and `format` do not.
    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            n: self.n,
            suites: self.suites.clone(),
            degree: self.degree,
            trials: self.trials,
            samples: self.samples,
            fd_step: self.fd_step,
            tol: self.tol,
            riem_tol: self.riem_tol,
            reeb_tol: self.reeb_tol,
            mc_sigma: self.mc_sigma,
            ratio_tol: self.ratio_tol,
            seed: self.seed,
        }
    }
}

/// The part of the configuration echoed into reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub suites: Vec<Suite>,
    pub degree: u32,
    pub trials: usize,
    pub samples: usize,
    pub fd_step: f64,
    pub tol: f64,
    pub riem_tol: f64,
    pub reeb_tol: f64,
    pub mc_sigma: f64,
    pub ratio_tol: f64,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_cover_all_suites() {
        let c = SuiteConfig::default();
        assert_eq!(c.n, 2);
        assert_eq!(c.suites, Suite::ALL.to_vec());
        assert!(c.workers >= 1);
    }

    #[test]
    fn parses_flat_file_with_comments() {
        let mut c = SuiteConfig::default();
        c.apply_text("# run\nn = 3\nsuites = sphere, algebra\n\nseed=7 # fixed\nformat = csv\n").unwrap();
        assert_eq!(c.n, 3);
        assert_eq!(c.suites, vec![Suite::Algebra, Suite::Sphere]);
        assert_eq!(c.seed, 7);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let mut c = SuiteConfig::default();
        assert_eq!(c.apply_text("colour = red"), Err(ConfigError::UnknownKey("colour".into())));
        let err = c.set("samples", "-5").unwrap_err();
        assert!(err.to_string().contains("samples"), "{err}");
        assert!(c.set("samples", "500").is_err());
        assert!(c.set("trials", "0").is_err());
        assert!(c.set("tol", "nan").is_err());
        assert!(c.set("suites", "algebra,topology").is_err());
        assert!(matches!(c.apply_text("just words"), Err(ConfigError::Syntax { line: 1, .. })));
    }

    #[test]
    fn env_sets_workers() {
        let mut c = SuiteConfig::default();
        c.apply_env_value(Some("3")).unwrap();
        assert_eq!(c.workers, 3);
        assert!(c.apply_env_value(Some("zero")).is_err());
        c.apply_env_value(None).unwrap();
        assert_eq!(c.workers, 3);
    }
}
