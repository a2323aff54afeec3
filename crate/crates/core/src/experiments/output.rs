//! Study artifacts: raw and summary CSV tables plus a JSON run manifest.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::config_hash;
use super::sweep::SweepResult;
use crate::error::Result;
use crate::format::fmt_f64;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    schema_version: u32,
    study: &'a str,
    code_version: &'a str,
    seed: u64,
    config_hash: String,
    config: &'a C,
    outputs: Vec<String>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// `<name>_raw.csv` (one row per realization) and `<name>_summary.csv`.
pub fn write_sweep(dir: &Path, name: &str, res: &SweepResult) -> Result<Vec<PathBuf>> {
    let raw = dir.join(format!("{name}_raw.csv"));
    let mut w = csv::Writer::from_writer(create(&raw)?);
    w.write_record([res.parameter_name.as_str(), "realization", "value"])?;
    for p in &res.points {
        for (r, v) in p.values.iter().enumerate() {
            w.write_record([fmt_f64(p.parameter), r.to_string(), fmt_f64(*v)])?;
        }
    }
    w.flush()?;
    let summary = dir.join(format!("{name}_summary.csv"));
    let mut w = csv::Writer::from_writer(create(&summary)?);
    w.write_record([res.parameter_name.as_str(), "mean", "std", "sem", "count"])?;
    for p in &res.points {
        w.write_record([
            fmt_f64(p.parameter),
            fmt_f64(p.mean),
            fmt_f64(p.std),
            fmt_f64(p.sem()),
            p.values.len().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(vec![raw, summary])
}

/// Writes a CSV with the given header and rows of numbers.
pub fn write_table(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<PathBuf> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| fmt_f64(*v)))?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    use std::io::Write;
    writeln!(w)?;
    w.flush()?;
    Ok(path.to_path_buf())
}

/// `manifest.json` echoing the config, its hash, seed and code version, and
/// listing the output files relative to `dir`.
pub fn write_manifest<C: Serialize>(
    dir: &Path,
    study: &str,
    config: &C,
    seed: u64,
    outputs: &[PathBuf],
) -> Result<PathBuf> {
    let manifest = Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        study,
        code_version: CODE_VERSION,
        seed,
        config_hash: config_hash(config),
        config,
        outputs: outputs
            .iter()
            .map(|p| p.strip_prefix(dir).unwrap_or(p).display().to_string())
            .collect(),
    };
    write_json(&dir.join("manifest.json"), &manifest)
}
