//! Output directory: CSV and JSON files plus a manifest naming the figure
//! each file reproduces.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub figure: String,
    pub description: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    files: &'a [ManifestEntry],
    config: &'a C,
}

pub struct Output {
    dir: PathBuf,
    entries: Vec<ManifestEntry>,
}

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), entries: Vec::new() })
    }

    fn entry(&mut self, file: &str, figure: &str, description: &str) -> PathBuf {
        self.entries.push(ManifestEntry { file: file.into(), figure: figure.into(), description: description.into() });
        self.dir.join(file)
    }

    pub fn csv<R: AsRef<[String]>>(
        &mut self,
        file: &str,
        figure: &str,
        description: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = R>,
    ) -> Result<(), CliError> {
        let path = self.entry(file, figure, description);
        let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
        w.write_record(header).map_err(|e| io(&path, e))?;
        for row in rows {
            w.write_record(row.as_ref()).map_err(|e| io(&path, e))?;
        }
        w.flush().map_err(|e| io(&path, e))
    }

    pub fn json(&mut self, file: &str, figure: &str, description: &str, value: &impl Serialize) -> Result<(), CliError> {
        let path = self.entry(file, figure, description);
        write_json(&path, value)
    }

    pub fn finish(self, command: &str, config: &impl Serialize) -> Result<PathBuf, CliError> {
        let path = self.dir.join("manifest.json");
        write_json(&path, &Manifest { command, files: &self.entries, config })?;
        Ok(path)
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io(path, e))
}

/// Shortest round-trip representation.
pub fn num(x: f64) -> String {
    format!("{x}")
}
