//! `results.json`, `metadata.json` and the overall verdict.

use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use spinfw::checks::CheckResult;

use crate::config::{Mode, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// Every check must pass.
    Default,
    /// Checks flagged as expected failures may fail.
    NegativeResult,
}

impl Profile {
    pub fn label(self) -> &'static str {
        match self {
            Profile::Default => "default",
            Profile::NegativeResult => "negative-result",
        }
    }

    pub fn accepts(self, c: &CheckResult) -> bool {
        c.pass || (self == Profile::NegativeResult && c.expected_failure)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the effective configuration (after command-line overrides).
pub fn config_hash(cfg: &RunConfig) -> String {
    let canonical = serde_json::to_value(cfg).expect("config serializes").to_string();
    sha256_hex(canonical.as_bytes())
}

pub struct RunRecord<'a> {
    pub mode: Mode,
    pub profile: Profile,
    pub seed: u64,
    pub config_hash: String,
    pub checks: &'a [CheckResult],
    pub artifacts: &'a [String],
    pub summary: Value,
    pub error: Option<String>,
}

impl RunRecord<'_> {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| self.profile.accepts(c))
    }

    pub fn run_id(&self) -> String {
        let key = format!("{}|{}|{}|{}", self.config_hash, self.mode.label(), self.profile.label(), self.seed);
        sha256_hex(key.as_bytes())[..16].to_string()
    }

    /// Keys are sorted, so identical runs give identical bytes.
    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut v = serde_json::to_value(c).expect("check serializes");
                v["accepted"] = json!(self.profile.accepts(c));
                v
            })
            .collect();
        json!({
            "run_id": self.run_id(),
            "config_hash": self.config_hash,
            "mode": self.mode.label(),
            "profile": self.profile.label(),
            "seed": self.seed,
            "checks": checks,
            "artifacts": self.artifacts,
            "summary": self.summary,
            "error": self.error,
            "pass": self.pass(),
        })
    }
}

pub fn write_results(dir: &Path, record: &RunRecord) -> Result<(), CliError> {
    write(dir, "results.json", &record.to_json())
}

pub fn write_metadata(
    dir: &Path,
    record: &RunRecord,
    experiment: &str,
    started: SystemTime,
    wall: Duration,
) -> Result<(), CliError> {
    let meta = json!({
        "run_id": record.run_id(),
        "experiment": experiment,
        "started_unix": started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
        "wall_time_s": wall.as_secs_f64(),
        "version": env!("CARGO_PKG_VERSION"),
        "args": std::env::args().collect::<Vec<_>>(),
    });
    write(dir, "metadata.json", &meta)
}

fn write(dir: &Path, name: &str, v: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    std::fs::write(dir.join(name), text).map_err(|e| CliError::Io(format!("{}: {e}", dir.join(name).display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use spinfw::checks::{Bound, Metric};

    #[test]
    fn profiles_accept_only_flagged_failures() {
        let mut c = CheckResult::new("x", vec![Metric::new("m", 1.0, Bound::Below { limit: 0.5 })]);
        assert!(!Profile::Default.accepts(&c));
        assert!(!Profile::NegativeResult.accepts(&c));
        c.expected_failure = true;
        assert!(!Profile::Default.accepts(&c));
        assert!(Profile::NegativeResult.accepts(&c));
    }

    #[test]
    fn hash_matches_a_known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
