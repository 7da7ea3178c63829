//! Atomic CSV/JSON writers and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use bolab_core::io::write_atomic;
use serde::Serialize;

use crate::error::CliError;

/// Seventeen significant digits, so values survive a text roundtrip.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Output {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Register a file written by a core dump helper.
    pub fn record(&mut self, name: &str) {
        self.files.push(name.to_string());
    }

    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            let cells: Vec<String> = row.into_iter().map(num).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        write_atomic(&self.path(name), text.as_bytes())?;
        self.record(name);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        text.push('\n');
        write_atomic(&self.path(name), text.as_bytes())?;
        self.record(name);
        Ok(())
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub version: String,
    pub duration_seconds: f64,
    pub outputs: Vec<String>,
}

pub const MANIFEST_NAME: &str = "run.json";
