//! Run manifests: everything needed to repeat a run and check its outputs.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::output::OutputFile;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub task: String,
    pub seed: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    /// Subcommand that produced the run: `spoof-run`, `bayes-check` or `theory-check`.
    pub command: String,
    /// The resolved configuration, TOML.
    pub config: String,
    pub config_hash: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub seeds: Vec<SeedEntry>,
    pub outputs: Vec<OutputFile>,
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    /// Outputs whose hash differs from `other`, or that are missing there.
    pub fn mismatches(&self, other: &[OutputFile]) -> Vec<String> {
        let mut bad = Vec::new();
        for f in &self.outputs {
            match other.iter().find(|g| g.path == f.path) {
                Some(g) if g.sha256 == f.sha256 => {}
                Some(_) => bad.push(format!("{} differs", f.path)),
                None => bad.push(format!("{} missing", f.path)),
            }
        }
        for g in other {
            if !self.outputs.iter().any(|f| f.path == g.path) {
                bad.push(format!("{} unexpected", g.path));
            }
        }
        bad
    }
}
