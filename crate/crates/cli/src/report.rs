//! Report records and their JSON, CSV and text forms.
//!
//! JSON schema (field names are stable):
//!
//! ```text
//! { "tool": "qc-verify", "version": "...", "generated_at_unix": u64 | null,
//!   "summary": { "passed": u, "failed": u, "seed": u64, "config": {...} },
//!   "checks": [ { "id", "anchor", "status": "pass" | "fail",
//!                 "residual": { "kind": "exact-zero" }
//!                           | { "kind": "exact", "value": "p/q" }
//!                           | { "kind": "float", "value": f64 }
//!                           | { "kind": "error", "value": "message" },
//!                 "detail", "runtime_ms": f64 | null } ] }
//! ```

use std::fmt::Write as _;

use qc_core::Rational;
use serde::{Deserialize, Serialize};

use crate::config::{ConfigEcho, Format};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Residual {
    ExactZero,
    /// Nonzero exact value, as `p/q`.
    Exact(String),
    Float(f64),
    /// The check could not be evaluated.
    Error(String),
}

impl Residual {
    pub fn exact(r: &Rational) -> Self {
        if *r.numer() == 0.into() {
            Residual::ExactZero
        } else {
            Residual::Exact(r.to_string())
        }
    }

    /// Non-finite values are not representable in JSON and become errors.
    pub fn float(x: f64) -> Self {
        if x.is_finite() {
            Residual::Float(x)
        } else {
            Residual::Error(format!("non-finite residual {x}"))
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Residual::ExactZero => "exact-zero",
            Residual::Exact(_) => "exact",
            Residual::Float(_) => "float",
            Residual::Error(_) => "error",
        }
    }

    fn value(&self) -> String {
        match self {
            Residual::ExactZero => "0".to_string(),
            Residual::Exact(s) | Residual::Error(s) => s.clone(),
            Residual::Float(x) => format!("{x:e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The statement being checked.
    pub anchor: String,
    pub status: Status,
    pub residual: Residual,
    pub detail: String,
    pub runtime_ms: Option<f64>,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, anchor: &str, ok: bool, residual: Residual, detail: impl Into<String>) -> Self {
        let status = if matches!(residual, Residual::Error(_)) { Status::Fail } else { Status::from_bool(ok) };
        CheckRecord { id: id.into(), anchor: anchor.to_string(), status, residual, detail: detail.into(), runtime_ms: None }
    }

    pub fn error(id: impl Into<String>, anchor: &str, message: impl Into<String>) -> Self {
        CheckRecord::new(id, anchor, false, Residual::Error(message.into()), "")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub seed: u64,
    pub config: ConfigEcho,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub generated_at_unix: Option<u64>,
    pub summary: Summary,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    /// Sorts by check id and fills in the summary.
    pub fn assemble(config: ConfigEcho, mut checks: Vec<CheckRecord>, generated_at_unix: Option<u64>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
        Report {
            tool: "qc-verify".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            generated_at_unix,
            summary: Summary { passed: checks.len() - failed, failed, seed: config.seed, config },
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }
}

pub fn to_json(r: &Report) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> serde_json::Result<Report> {
    serde_json::from_str(text)
}

pub fn to_csv(r: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "anchor", "status", "residual_kind", "residual", "runtime_ms", "detail"])
        .expect("in-memory write");
    for c in &r.checks {
        let runtime = c.runtime_ms.map(|t| format!("{t:.3}")).unwrap_or_default();
        w.write_record([
            c.id.as_str(),
            c.anchor.as_str(),
            c.status.as_str(),
            c.residual.kind(),
            c.residual.value().as_str(),
            runtime.as_str(),
            c.detail.as_str(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn to_text(r: &Report) -> String {
    let mut s = String::new();
    for c in &r.checks {
        let _ = write!(s, "{} {} [{}: {}]", c.status.as_str().to_uppercase(), c.id, c.residual.kind(), c.residual.value());
        if !c.detail.is_empty() {
            let _ = write!(s, " {}", c.detail);
        }
        s.push('\n');
    }
    let cfg = &r.summary.config;
    let suites: Vec<&str> = cfg.suites.iter().map(|x| x.name()).collect();
    let _ = writeln!(
        s,
        "{} passed, {} failed (n = {}, suites = {}, seed = {})",
        r.summary.passed,
        r.summary.failed,
        cfg.n,
        suites.join(","),
        r.summary.seed
    );
    s
}

pub fn emit_report(r: &Report, format: Format) -> String {
    match format {
        Format::Json => to_json(r),
        Format::Csv => to_csv(r),
        Format::Text => to_text(r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SuiteConfig;

    fn sample() -> Report {
        let checks = vec![
            CheckRecord::new("b.second", "Δf = λf", false, Residual::float(1.5e-3), "too large"),
            CheckRecord::new("a.first", "x = y", true, Residual::exact(&qc_core::rat(0, 1)), ""),
            CheckRecord::new("c.third", "p = q", false, Residual::exact(&qc_core::rat(-3, 7)), "comma, \"quoted\""),
        ];
        Report::assemble(SuiteConfig::default().echo(), checks, Some(1))
    }

    #[test]
    fn assembly_sorts_and_counts() {
        let r = sample();
        let ids: Vec<&str> = r.checks.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["a.first", "b.second", "c.third"]);
        assert_eq!((r.summary.passed, r.summary.failed), (1, 2));
        assert!(!r.all_passed());
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        assert_eq!(from_json(&to_json(&r)).unwrap(), r);
    }

    #[test]
    fn empty_report_is_valid_json() {
        let r = Report::assemble(SuiteConfig::default().echo(), vec![], None);
        let v: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(v["checks"].as_array().unwrap().len(), 0);
        assert!(v["generated_at_unix"].is_null());
        assert!(r.all_passed());
    }

    #[test]
    fn csv_has_one_row_per_check() {
        let r = sample();
        let text = to_csv(&r);
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = rd.records().map(|x| x.unwrap()).collect();
        assert_eq!(rows.len(), 3);
        assert_eq!(&rows[1][2], "fail");
        assert_eq!(&rows[2][6], "comma, \"quoted\"");
        assert_eq!(&rows[0][3], "exact-zero");
    }

    #[test]
    fn non_finite_residuals_fail() {
        let c = CheckRecord::new("x", "", true, Residual::float(f64::NAN), "");
        assert_eq!(c.status, Status::Fail);
    }
}
