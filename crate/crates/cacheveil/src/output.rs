//! CSV writers, output destinations and run manifests.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::error::CliError;

/// Formats a float for CSV: shortest round-trip form, empty for `NaN`.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Opens `path` for writing, or stdout when `None`.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(io::stdout().lock()),
    })
}

pub fn csv_writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    Ok(csv::WriterBuilder::new().from_writer(sink(path)?))
}

/// `report.json` + `decision` -> `report.decision.csv`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub scenario_digest: String,
    pub parameters: serde_json::Value,
    pub tool_version: String,
    pub timestamp: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, scenario_digest: String, parameters: serde_json::Value) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            scenario_digest,
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            outputs: Vec::new(),
        }
    }

    pub fn add(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Writes the manifest next to the first output (or into `dir`), and
    /// returns its path; nothing is written when every output went to stdout.
    pub fn write(&self, dir: Option<&Path>) -> Result<Option<PathBuf>, CliError> {
        let path = match (dir, self.outputs.first()) {
            (Some(d), _) => d.join("manifest.json"),
            (None, Some(first)) => sibling(Path::new(first), "manifest.json"),
            (None, None) => return Ok(None),
        };
        crate::formats::write_json(&path, self)?;
        Ok(Some(path))
    }
}
