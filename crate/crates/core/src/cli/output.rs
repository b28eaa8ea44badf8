//! Output directory bookkeeping and the run manifest.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::Result;
use crate::levels::GridField;
use crate::tolerances::{self, Tolerance};

/// One pass/fail line of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: value < limit,
            detail: format!("{value:.3e} < {limit:e}"),
        }
    }

    pub fn above(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: value > limit,
            detail: format!("{value:.3e} > {limit:e}"),
        }
    }

    pub fn holds(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Everything needed to reproduce a run, written last as `manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub version: String,
    pub tolerances: Vec<Tolerance>,
    pub outputs: Vec<String>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Writes files into the output directory and remembers their names.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutputSet {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        self.dir.join(name)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.path(name);
        fs::write(path, text)?;
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_text(name, &text)
    }

    /// Grid data as `stem.csv`/`stem.dat` plus a `stem.json` sidecar, or a
    /// single `stem.json` holding sidecar and values.
    pub fn write_field(
        &mut self,
        stem: &str,
        field: &GridField,
        format: OutputFormat,
        extra: serde_json::Map<String, serde_json::Value>,
    ) -> Result<()> {
        let mut sidecar = field.sidecar();
        sidecar.extra = extra;
        match format {
            OutputFormat::Csv | OutputFormat::Matrix => {
                let (ext, csv) = if format == OutputFormat::Csv { ("csv", true) } else { ("dat", false) };
                let path = self.path(&format!("{stem}.{ext}"));
                let out = BufWriter::new(fs::File::create(path)?);
                if csv {
                    field.write_csv(out)?;
                } else {
                    field.write_matrix(out)?;
                }
                self.write_json(&format!("{stem}.json"), &sidecar)
            }
            OutputFormat::Json => {
                let rows: Vec<&[f64]> = field.values.chunks(field.nx).collect();
                let mut value = serde_json::to_value(&sidecar)?;
                value["values"] = serde_json::to_value(rows)?;
                self.write_json(&format!("{stem}.json"), &value)
            }
        }
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    /// Writes the manifest, which lists itself among the outputs.
    pub fn finish(mut self, command: &str, parameters: serde_json::Value, checks: Vec<Check>) -> Result<RunManifest> {
        self.path(MANIFEST_NAME);
        let manifest = RunManifest {
            command: command.to_string(),
            parameters,
            version: env!("CARGO_PKG_VERSION").to_string(),
            tolerances: tolerances::table(),
            outputs: self.files.clone(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        };
        self.write_json(MANIFEST_NAME, &manifest)?;
        Ok(manifest)
    }
}
