//! JSON run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use vnls_core::linalg::{CMatrix, CVector};
use vnls_core::verification::GridSpec;
use vnls_core::{BoundarySpec, SolitonData};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Simulate,
    Collide,
    Reflect,
    Mirror,
    Verify,
    Transfer,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Collide => "collide",
            Mode::Reflect => "reflect",
            Mode::Mirror => "mirror",
            Mode::Verify => "verify",
            Mode::Transfer => "transfer",
        }
    }
}

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonConfig {
    pub u: f64,
    pub v: f64,
    pub beta: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryConfig {
    Robin { alpha: f64 },
    Mixed { signs: Vec<i8> },
    RotatedMixed { unitary: Vec<Vec<Pair>>, signs: Vec<i8> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x0: f64,
    pub x1: f64,
    pub nx: usize,
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub name: String,
    #[serde(default)]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of components.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Number of solitons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Boundary class for boundary suites: `robin`, `mixed` or `rotated_mixed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub solitons: Vec<SolitonConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<SuiteConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn invalid(path: &str, message: impl ToString) -> CliError {
    CliError::Config { path: path.to_string(), message: message.to_string() }
}

fn complex(p: &Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    /// Number of components: `n` if given, else the length of the first `beta`.
    pub fn components(&self) -> Result<usize, CliError> {
        match (self.n, self.solitons.first()) {
            (Some(0), _) => Err(invalid("n", "must be at least 1")),
            (Some(n), _) => Ok(n),
            (None, Some(s)) => Ok(s.beta.len()),
            (None, None) => Err(invalid("n", "missing and no solitons to infer it from")),
        }
    }

    pub fn soliton_data(&self) -> Result<SolitonData, CliError> {
        if self.solitons.is_empty() {
            return Err(invalid("solitons", "at least one soliton is required"));
        }
        let n = self.components()?;
        let mut raw = Vec::with_capacity(self.solitons.len());
        for (i, s) in self.solitons.iter().enumerate() {
            if s.beta.len() != n {
                return Err(invalid(
                    &format!("solitons[{i}].beta"),
                    format!("has {} components, expected {n}", s.beta.len()),
                ));
            }
            raw.push((s.u, s.v, CVector::from_iterator(n, s.beta.iter().map(complex))));
        }
        SolitonData::from_raw(n, &raw).map_err(|e| invalid("solitons", e))
    }

    pub fn boundary_spec(&self) -> Result<Option<BoundarySpec>, CliError> {
        let Some(b) = &self.boundary else { return Ok(None) };
        let spec = match b {
            BoundaryConfig::Robin { alpha } => BoundarySpec::robin(*alpha),
            BoundaryConfig::Mixed { signs } => BoundarySpec::mixed(signs.clone()),
            BoundaryConfig::RotatedMixed { unitary, signs } => {
                let rows = unitary.len();
                if let Some(i) = unitary.iter().position(|r| r.len() != rows) {
                    return Err(invalid(&format!("boundary.unitary[{i}]"), format!("expected {rows} entries")));
                }
                let m = CMatrix::from_fn(rows, rows, |i, j| complex(&unitary[i][j]));
                BoundarySpec::rotated_mixed(m, signs.clone())
            }
        };
        spec.map(Some).map_err(|e| invalid("boundary", e))
    }

    pub fn grid_spec(&self) -> Result<GridSpec, CliError> {
        let g = self.grid.ok_or_else(|| invalid("grid", "required for this mode"))?;
        GridSpec::new(g.x0, g.x1, g.nx, g.t0, g.t1, g.nt).map_err(|e| invalid("grid", e))
    }

    pub fn suite(&self) -> Result<&SuiteConfig, CliError> {
        self.suite.as_ref().ok_or_else(|| invalid("suite", "required for this mode"))
    }
}

/// Named tolerances with their defaults.
pub const DEFAULT_TOLERANCES: [(&str, f64); 9] = [
    ("algebraic", 1e-10),
    ("involution", 1e-12),
    ("unitarity", 1e-12),
    ("oracle", 1e-12),
    ("transfer", 1e-12),
    ("mirror", 1e-8),
    ("reflection", 1e-6),
    ("asymptotic", 1e-4),
    ("shift", 1e-3),
];

/// Default tolerances merged with per-run overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn resolve(overrides: Option<&BTreeMap<String, f64>>) -> Result<Self, CliError> {
        let mut map: BTreeMap<String, f64> = DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in overrides.into_iter().flatten() {
            if !map.contains_key(k) {
                return Err(invalid(&format!("suite.tolerances.{k}"), "unknown tolerance name"));
            }
            if !(v.is_finite() && *v >= 0.0) {
                return Err(invalid(&format!("suite.tolerances.{k}"), "must be a finite non-negative number"));
            }
            map.insert(k.clone(), *v);
        }
        Ok(Self(map))
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }
}
