//! Report documents. Everything written here is deterministic given the
//! config and seed; wall-clock timings go to a separate file.

use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Mode, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Exploratory quantity, reported without a tolerance.
    Recorded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: Option<f64>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_sample: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resamples: Option<usize>,
}

impl Check {
    /// Passes when `residual <= tolerance`; NaN fails.
    pub fn against(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let status = if residual <= tolerance { Status::Pass } else { Status::Fail };
        Self {
            name: name.into(),
            residual,
            tolerance: Some(tolerance),
            status,
            samples: None,
            worst_sample: None,
            resamples: None,
        }
    }

    pub fn recorded(name: impl Into<String>, residual: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance: None,
            status: Status::Recorded,
            samples: None,
            worst_sample: None,
            resamples: None,
        }
    }

    pub fn with_samples(mut self, samples: usize, worst: Option<usize>, resamples: usize) -> Self {
        self.samples = Some(samples);
        self.worst_sample = worst;
        self.resamples = Some(resamples);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub mode: Mode,
    pub environment_digest: String,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub results: serde_json::Value,
    pub passed: bool,
}

impl Report {
    pub fn new(mode: Mode, config: RunConfig, checks: Vec<Check>, results: serde_json::Value) -> Self {
        let passed = checks.iter().all(|c| c.status != Status::Fail);
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            mode,
            environment_digest: environment_digest(),
            config,
            checks,
            results,
            passed,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Tool name, version and target.
pub fn environment_digest() -> String {
    sha256_hex(
        format!(
            "{} {} {} {}",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION"),
            std::env::consts::OS,
            std::env::consts::ARCH
        )
        .as_bytes(),
    )
}

#[derive(Debug, Serialize)]
struct Stage {
    stage: String,
    seconds: f64,
}

/// Wall-clock seconds per named stage.
#[derive(Debug, Default, Serialize)]
pub struct Timings(Vec<Stage>);

impl Timings {
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.push(Stage { stage: name.to_string(), seconds: start.elapsed().as_secs_f64() });
        out
    }
}
