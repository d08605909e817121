//! CSV, manifest and plot output. Files are staged under temporary names
//! and renamed once all of them are written.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

use super::config::ExperimentConfig;
use super::svg::Plot;

/// Software version recorded in every output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    /// File stem suffix; empty for the primary table.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Column by name as floats (non-numeric cells become NaN).
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Int(v) => *v as f64,
                    Cell::Float(v) => *v,
                    _ => f64::NAN,
                })
                .collect(),
        )
    }

    /// CSV text with `# config_hash=` and `# version=` comment lines.
    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut s = format!("# config_hash={config_hash}\n# version={VERSION}\n");
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Outcome of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub version: String,
    pub wall_clock_seconds: f64,
    /// The first table is the primary CSV.
    pub tables: Vec<Table>,
    /// Fits and derived quantities.
    pub derived: Value,
    pub plot: Plot,
}

impl RunResult {
    pub fn primary(&self) -> &Table {
        &self.tables[0]
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    fn stem(&self, table: &Table) -> String {
        let base = self.config.experiment.name();
        if table.name.is_empty() {
            base.to_string()
        } else {
            format!("{base}_{}", table.name)
        }
    }

    pub fn manifest(&self) -> Value {
        serde_json::to_value(self).expect("result serializes")
    }

    /// Writes every CSV, the manifest and the plot into `dir`, returning the
    /// paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let base = self.config.experiment.name();
        let mut files: Vec<(PathBuf, String)> = self
            .tables
            .iter()
            .map(|t| {
                (
                    dir.join(format!("{}.csv", self.stem(t))),
                    t.to_csv(&self.config_hash),
                )
            })
            .collect();
        let manifest = serde_json::to_string_pretty(&self.manifest())? + "\n";
        files.push((dir.join(format!("{base}.manifest.json")), manifest));
        files.push((dir.join(format!("{base}.svg")), self.plot.render()));
        write_all_atomic(&files)?;
        Ok(files.into_iter().map(|f| f.0).collect())
    }
}

/// Reads a manifest written by [`RunResult::write`].
pub fn read_manifest(path: &Path) -> Result<RunResult> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn staged(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}

/// Writes all files under staging names, then renames them into place; on
/// failure the staged files are removed and nothing is renamed.
pub fn write_all_atomic(files: &[(PathBuf, String)]) -> Result<()> {
    let mut written = Vec::new();
    for (path, text) in files {
        let tmp = staged(path);
        if let Err(e) = fs::write(&tmp, text) {
            for t in &written {
                let _ = fs::remove_file(t);
            }
            return Err(Error::io(path, e));
        }
        written.push(tmp);
    }
    for ((path, _), tmp) in files.iter().zip(&written) {
        fs::rename(tmp, path).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Writes one file atomically.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    write_all_atomic(&[(path.to_path_buf(), text.to_string())])
}
