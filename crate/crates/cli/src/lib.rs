//! Workbench behind the `vnls` binary: reads a JSON run configuration, runs
//! one mode, and writes `report.json`, `manifest.json`, `timings.json` and,
//! for `simulate`, `grid.csv` into the output directory.
//!
//! Exit codes: 0 when every check passes, 1 for invalid input or I/O
//! failures, 2 when a check fails.

pub mod config;
pub mod error;
pub mod export;
pub mod modes;
pub mod report;
pub mod suites;

use std::path::{Path, PathBuf};

pub use config::{Mode, RunConfig};
pub use error::CliError;
pub use report::{Check, Report, Status};

use config::Tolerances;
use export::{export_grid, write_json, write_manifest};
use report::Timings;

/// Used when neither the config nor the command line names a directory.
pub const DEFAULT_OUTPUT: &str = "vnls-out";

/// Command-line settings that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub out_dir: PathBuf,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.report.passed {
            0
        } else {
            2
        }
    }
}

/// Exit code for a finished or failed run.
pub fn exit_code(result: &Result<Outcome, CliError>) -> u8 {
    match result {
        Ok(outcome) => outcome.exit_code(),
        Err(_) => 1,
    }
}

pub fn run_file(mode: Mode, path: &Path, overrides: &Overrides) -> Result<Outcome, CliError> {
    run(mode, RunConfig::load(path)?, overrides)
}

/// Validates `config`, runs `mode` and writes the output files. Nothing is
/// written when validation or the construction itself fails.
pub fn run(mode: Mode, mut config: RunConfig, overrides: &Overrides) -> Result<Outcome, CliError> {
    if let Some(m) = config.mode {
        if m != mode {
            return Err(CliError::Config {
                path: "mode".into(),
                message: format!("config says `{}` but `{}` was requested", m.name(), mode.name()),
            });
        }
    }
    config.mode = Some(mode);
    if overrides.seed.is_some() || overrides.samples.is_some() {
        let suite = config.suite.as_mut().ok_or_else(|| CliError::Config {
            path: "suite".into(),
            message: "--seed and --samples need a suite block".into(),
        })?;
        if let Some(seed) = overrides.seed {
            suite.seed = Some(seed);
        }
        if let Some(samples) = overrides.samples {
            suite.samples = samples;
        }
    }
    if let Some(suite) = &config.suite {
        if suite.samples > 0 && suite.seed.is_none() {
            return Err(CliError::Config { path: "suite.seed".into(), message: "required when samples > 0".into() });
        }
    }
    let tol = Tolerances::resolve(config.suite.as_ref().map(|s| &s.tolerances))?;

    let mut timings = Timings::default();
    let output = timings.time(mode.name(), || match mode {
        Mode::Simulate => modes::simulate(&config),
        Mode::Collide => modes::collide(&config, &tol),
        Mode::Reflect => modes::reflect(&config, &tol),
        Mode::Mirror => modes::mirror(&config, &tol),
        Mode::Verify => modes::verify(&config, &tol),
        Mode::Transfer => modes::transfer(&config, &tol),
    })?;

    let out_dir = overrides.out.clone().or_else(|| config.output.clone()).unwrap_or_else(|| DEFAULT_OUTPUT.into());
    std::fs::create_dir_all(&out_dir).map_err(|source| CliError::Io { path: out_dir.clone(), source })?;
    let mut files = Vec::new();
    if let Some(grid) = &output.grid {
        timings.time("export", || export_grid(grid, &out_dir.join("grid.csv")))?;
        files.push("grid.csv");
    }
    let report = Report::new(mode, config.clone(), output.checks, output.results);
    write_json(&report, &out_dir.join("report.json"))?;
    files.push("report.json");
    write_manifest(&out_dir, &config, &files)?;
    write_json(&timings, &out_dir.join("timings.json"))?;
    Ok(Outcome { report, out_dir })
}
