//! Grid CSV and manifest files.

use std::path::Path;

use serde::Serialize;
use vnls_core::verification::FieldGrid;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::sha256_hex;

/// Writes `x,t,re_1,im_1,...,re_n,im_n`, one row per sample, `t` outer and
/// `x` inner.
pub fn export_grid(grid: &FieldGrid, path: &Path) -> Result<(), CliError> {
    let csv_err = |source| CliError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec!["x".to_string(), "t".to_string()];
    for c in 1..=grid.n() {
        header.push(format!("re_{c}"));
        header.push(format!("im_{c}"));
    }
    w.write_record(&header).map_err(csv_err)?;
    let spec = grid.spec();
    let mut row = Vec::with_capacity(2 + 2 * grid.n());
    for it in 0..spec.nt {
        for ix in 0..spec.nx {
            row.clear();
            row.push(spec.x(ix));
            row.push(spec.t(it));
            for z in grid.value(ix, it).iter() {
                row.push(z.re);
                row.push(z.im);
            }
            w.serialize(&row).map_err(csv_err)?;
        }
    }
    w.flush().map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub dataset_digest: String,
    pub files: Vec<FileDigest>,
}

/// Digest of the data-defining part of a config (solitons, boundary, grid).
pub fn dataset_digest(config: &RunConfig) -> String {
    let data = serde_json::json!({
        "n": config.n,
        "solitons": config.solitons,
        "boundary": config.boundary,
        "grid": config.grid,
    });
    sha256_hex(data.to_string().as_bytes())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Writes `manifest.json` next to the listed files.
pub fn write_manifest(dir: &Path, config: &RunConfig, files: &[&str]) -> Result<(), CliError> {
    let mut digests = Vec::with_capacity(files.len());
    for name in files {
        let path = dir.join(name);
        let bytes = std::fs::read(&path).map_err(|source| CliError::Io { path, source })?;
        digests.push(FileDigest { name: name.to_string(), sha256: sha256_hex(&bytes) });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config,
        dataset_digest: dataset_digest(config),
        files: digests,
    };
    write_json(&manifest, &dir.join("manifest.json"))
}
