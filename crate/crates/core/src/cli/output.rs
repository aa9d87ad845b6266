//! CSV tables and JSON manifests.

use crate::error::Result;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// Reals carry 17 significant digits so they read back bit for bit.
    pub fn render(&self) -> String {
        match self {
            Cell::Real(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// Short tag appended to the file stem, empty for the main table.
    pub tag: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(tag: &str, headers: &[&str]) -> Self {
        Self { tag: tag.to_string(), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        Ok(w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?)
    }
}

/// `<model>_<experiment>_<timestamp>`. The timestamp honours
/// `SOURCE_DATE_EPOCH` so runs can be made byte-identical.
pub fn file_stem(model: &str, experiment: &str) -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<i64>().ok())
        .and_then(|s| chrono::DateTime::from_timestamp(s, 0))
        .unwrap_or_else(chrono::Utc::now);
    format!("{model}_{experiment}_{}", now.format("%Y%m%dT%H%M%SZ"))
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, C: Serialize, R: Serialize> {
    pub experiment: &'a str,
    pub config: &'a C,
    pub artifacts: Vec<String>,
    pub results: R,
}

/// Writes every table as `<stem>[_<tag>].csv` and the manifest as
/// `<stem>.json`; returns the paths written.
pub fn write_artifacts<C: Serialize, R: Serialize>(
    dir: &Path,
    stem: &str,
    experiment: &str,
    config: &C,
    tables: &[Table],
    results: R,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let mut names = Vec::new();
    for t in tables {
        let name = if t.tag.is_empty() { format!("{stem}.csv") } else { format!("{stem}_{}.csv", t.tag) };
        let path = dir.join(&name);
        fs::write(&path, t.to_csv()?)?;
        names.push(name);
        paths.push(path);
    }
    let manifest = Manifest { experiment, config, artifacts: names, results };
    let path = dir.join(format!("{stem}.json"));
    fs::write(&path, serde_json::to_vec_pretty(&manifest)?)?;
    paths.push(path);
    Ok(paths)
}
