//! Output files: CSV tables and gnuplot-style plot data with JSON sidecars.
//!
//! Every file written through [`OutputDir`] is recorded with its SHA-256 so
//! the run manifest can list and later verify it.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct OutputFile {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(CliError::io(&root))?;
        Ok(Self {
            root,
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(CliError::io(parent))?;
        }
        fs::write(&path, bytes).map_err(CliError::io(&path))?;
        self.files.push(OutputFile {
            path: rel.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn write_table(&mut self, rel: &str, table: &Table) -> Result<()> {
        let bytes = table.to_csv()?;
        self.write(rel, &bytes)
    }

    pub fn write_plot(&mut self, rel_stem: &str, plot: &PlotData) -> Result<()> {
        let (dat, json) = plot.render()?;
        self.write(&format!("{rel_stem}.dat"), dat.as_bytes())?;
        self.write(&format!("{rel_stem}.json"), json.as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A CSV table of pre-formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let to_err = |e: csv::Error| CliError::Core(xebspoof::Error::Numerical(format!("csv: {e}")));
        w.write_record(&self.header).map_err(to_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(to_err)?;
        }
        w.into_inner()
            .map_err(|e| CliError::Core(xebspoof::Error::Numerical(format!("csv: {e}"))))
    }
}

/// Locale-independent float formatting (shortest round-trip form).
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Columns of numbers for plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotData {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub columns: Vec<String>,
    /// Pairs `(value column, error column)` for error bars.
    pub error_bars: Vec<(String, String)>,
    #[serde(skip)]
    pub rows: Vec<Vec<f64>>,
}

impl PlotData {
    /// Whitespace-separated data with a `#` header, and the JSON sidecar.
    pub fn render(&self) -> Result<(String, String)> {
        if self.rows.is_empty() {
            return Err(CliError::Config(format!("plot {:?} has no rows", self.title)));
        }
        let mut dat = format!("# {}\n", self.columns.join(" "));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
            dat.push_str(&cells.join(" "));
            dat.push('\n');
        }
        let json = serde_json::to_string_pretty(self).expect("plot metadata serializes");
        Ok((dat, json + "\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_header_and_empty() {
        let mut p = PlotData {
            title: "t".into(),
            x_label: "k".into(),
            y_label: "XE".into(),
            columns: vec!["k".into(), "xe".into(), "err".into()],
            error_bars: vec![("xe".into(), "err".into())],
            rows: vec![],
        };
        assert!(p.render().is_err());
        p.rows.push(vec![1.0, -0.5, 0.01]);
        let (dat, json) = p.render().unwrap();
        assert_eq!(dat, "# k xe err\n1 -0.5 0.01\n");
        assert!(json.contains("\"x_label\": \"k\""));
    }

    #[test]
    fn csv_quotes_outcomes() {
        let mut t = Table::new(vec!["index", "outcome"]);
        t.push(vec!["0".into(), "1,0,2".into()]);
        assert_eq!(
            String::from_utf8(t.to_csv().unwrap()).unwrap(),
            "index,outcome\n0,\"1,0,2\"\n"
        );
    }
}
