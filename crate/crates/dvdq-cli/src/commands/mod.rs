//! Subcommand implementations and the report document schemas they share.

pub mod eval_arq;
pub mod quantize;
pub mod report;
pub mod simulate;
pub mod sweep;

use std::path::{Path, PathBuf};

use dvdq_core::{Error, ErrorReport, Result};
use serde::{Deserialize, Serialize};

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Creates the output directory and refuses to clobber existing artifacts
/// unless `--force` was given.
pub fn prepare_out_dir(out: &Path, force: bool, files: &[PathBuf]) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    if !force {
        for f in files {
            if f.exists() {
                return Err(Error::validation(format!(
                    "{} already exists; pass --force to overwrite",
                    f.display()
                )));
            }
        }
    }
    Ok(())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

/// Per-layer entry of a `quantize` report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerReport {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub bits: u8,
    pub error: ErrorReport,
    pub minmax_error: ErrorReport,
    /// `error.err_std / minmax_error.err_std` (1 for the baseline itself).
    pub err_std_ratio: f64,
}

/// The `report.json` a `quantize` run writes and `report` consumes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantizeReport {
    pub format_version: u32,
    pub method: String,
    pub bits_w: u8,
    pub pbq_steps: usize,
    pub layers: Vec<LayerReport>,
    pub mean_err_std_ratio: f64,
    pub max_err_std_ratio: f64,
}

impl QuantizeReport {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: QuantizeReport = serde_json::from_str(&text).map_err(|e| {
            Error::validation(format!(
                "{}: not a quantize report ({e})",
                path.display()
            ))
        })?;
        if doc.format_version != REPORT_FORMAT_VERSION {
            return Err(Error::unsupported(format!(
                "{}: report format_version {}",
                path.display(),
                doc.format_version
            )));
        }
        if doc.layers.is_empty() {
            return Err(Error::validation(format!("{}: report lists no layers", path.display())));
        }
        Ok(doc)
    }
}
