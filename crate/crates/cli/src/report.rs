//! Check records and the CSV / JSON renderings of a run.

use crate::config::ExperimentConfig;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One measured quantity against its tolerance; passes when `value <= tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            // NaN fails
            passed: value <= tolerance,
        }
    }

    /// A check that could not be evaluated.
    pub fn error(name: impl Into<String>, tolerance: f64) -> Self {
        Self::new(name, f64::NAN, tolerance)
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub csv_header: String,
    pub rows: Vec<String>,
    pub results: Value,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Full-precision scientific notation (17 significant digits).
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut h = Sha256::new();
    h.update(VERSION.as_bytes());
    h.update([0]);
    h.update(
        serde_json::to_string(cfg)
            .expect("config serializes")
            .as_bytes(),
    );
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn render_csv(cfg: &ExperimentConfig, report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("# dampwave {VERSION}\n"));
    out.push_str(&format!("# config-hash sha256:{}\n", config_hash(cfg)));
    out.push_str(&format!(
        "# config {}\n",
        serde_json::to_string(cfg).expect("config serializes")
    ));
    out.push_str(&report.csv_header);
    out.push('\n');
    for row in &report.rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}

pub fn render_json(cfg: &ExperimentConfig, report: &Report) -> String {
    let summary = serde_json::json!({
        "version": VERSION,
        "config_hash": format!("sha256:{}", config_hash(cfg)),
        "config": cfg,
        "passed": report.passed(),
        "checks": report.checks,
        "results": report.results,
    });
    let mut s = serde_json::to_string_pretty(&summary).expect("summary serializes");
    s.push('\n');
    s
}
