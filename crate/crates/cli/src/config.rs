//! Experiment configuration files (TOML).
//!
//! ```toml
//! name = "fig2"
//! seed = 0
//! trials = 1
//!
//! [model]
//! family = "gbs"        # fbs | gbs | fs
//! modes = 16
//! particles = [4]       # input photons (fbs, fs) or sectors (gbs)
//! mean_photons = 4.0    # gbs only
//!
//! [spoof]
//! k = [1, 10, 100, 1000]
//! samples = 10000
//! sampler = "uniform"
//! indicator = "marginal"
//!
//! [metrics]
//! variants = ["log"]
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use xebspoof::metrics::XeVariant;
use xebspoof::mockups::{IndicatorKind, SamplerKind};
use xebspoof::models::{Family, ENUMERATION_CAP};
use xebspoof::spoofer::Selection;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    /// Independent random circuits.
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Largest sector enumerated for exact references.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_sector: Option<u64>,
    pub model: ModelConfig,
    #[serde(default)]
    pub spoof: SpoofSection,
    #[serde(default)]
    pub metrics: MetricsSection,
    #[serde(default)]
    pub outputs: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub family: String,
    /// Fixed mode count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    /// Mode count as a multiple of the particle number.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes_per_particle: Option<usize>,
    pub particles: Vec<usize>,
    /// Total mean photon number, spread evenly over the squeezed modes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_photons: Option<f64>,
    /// Number of squeezed input modes, counted from mode 0 (default: all).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squeezed_modes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpoofSection {
    #[serde(default = "default_k")]
    pub k: Vec<usize>,
    /// Samples per sector.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// When set, split this many samples over the sectors in proportion to `Pr(N)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_samples: Option<usize>,
    #[serde(default = "default_sampler")]
    pub sampler: String,
    #[serde(default = "default_indicator")]
    pub indicator: String,
    #[serde(default = "default_selection")]
    pub selection: String,
}

impl Default for SpoofSection {
    fn default() -> Self {
        Self {
            k: default_k(),
            samples: default_samples(),
            total_samples: None,
            sampler: default_sampler(),
            indicator: default_indicator(),
            selection: default_selection(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsSection {
    #[serde(default = "default_variants")]
    pub variants: Vec<String>,
    /// Sector normalization; defaults to on for gbs and off otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalize: Option<bool>,
    /// `exact`, `sampled` or `auto` (exact when the sector is enumerable).
    #[serde(default = "default_reference")]
    pub reference: String,
}

impl Default for MetricsSection {
    fn default() -> Self {
        Self {
            variants: default_variants(),
            normalize: None,
            reference: default_reference(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Write per-run sample CSVs.
    #[serde(default = "yes")]
    pub samples: bool,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            samples: true,
            histogram_bins: default_bins(),
        }
    }
}

fn one() -> usize {
    1
}
fn yes() -> bool {
    true
}
fn default_k() -> Vec<usize> {
    vec![1]
}
fn default_samples() -> usize {
    1000
}
fn default_sampler() -> String {
    "uniform".into()
}
fn default_indicator() -> String {
    "marginal".into()
}
fn default_selection() -> String {
    "batch".into()
}
fn default_variants() -> Vec<String> {
    vec!["log".into()]
}
fn default_reference() -> String {
    "auto".into()
}
fn default_bins() -> usize {
    50
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    Exact,
    Sampled,
    Auto,
}

/// A validated configuration with names resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub family: Family,
    pub sampler: SamplerKind,
    pub indicator: IndicatorKind,
    pub selection: Selection,
    pub variants: Vec<XeVariant>,
    pub normalize: bool,
    pub reference: Reference,
    pub max_sector: u128,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.plan()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    /// Mode count for `particles`.
    pub fn modes_for(&self, particles: usize) -> Result<usize> {
        match (self.model.modes, self.model.modes_per_particle) {
            (Some(m), None) => Ok(m),
            (None, Some(f)) => Ok(f * particles),
            _ => Err(CliError::Config(
                "model needs exactly one of `modes` and `modes_per_particle`".into(),
            )),
        }
    }

    pub fn plan(&self) -> Result<Plan> {
        let bad = |m: String| Err(CliError::Config(m));
        let family = match self.model.family.as_str() {
            "fbs" => Family::Fock,
            "gbs" => Family::Gaussian,
            "fs" => Family::Fermion,
            other => return bad(format!("unknown family {other:?} (expected fbs | gbs | fs)")),
        };
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.model.particles.is_empty() {
            return bad("model.particles must list at least one particle number".into());
        }
        for &n in &self.model.particles {
            let m = self.modes_for(n)?;
            if n == 0 || n > m {
                return bad(format!("need 1 <= particles <= modes, got {n} on {m}"));
            }
        }
        if family == Family::Gaussian {
            match self.model.mean_photons {
                Some(x) if x > 0.0 && x.is_finite() => {}
                _ => return bad("gbs needs a positive model.mean_photons".into()),
            }
            if self.model.modes.is_none() {
                return bad("gbs needs a fixed model.modes".into());
            }
            if let Some(s) = self.model.squeezed_modes {
                if s == 0 || Some(s) > self.model.modes {
                    return bad(format!("squeezed_modes {s} outside 1..=modes"));
                }
            }
        } else if self.model.mean_photons.is_some() || self.model.squeezed_modes.is_some() {
            return bad("mean_photons and squeezed_modes only apply to gbs".into());
        }
        if self.spoof.k.is_empty() || self.spoof.k.contains(&0) {
            return bad("spoof.k must be a non-empty list of integers >= 1".into());
        }
        if self.spoof.samples == 0 || self.spoof.total_samples == Some(0) {
            return bad("sample counts must be >= 1".into());
        }
        let sampler: SamplerKind = self
            .spoof
            .sampler
            .parse()
            .map_err(|e: xebspoof::Error| CliError::Config(e.to_string()))?;
        let indicator: IndicatorKind = self
            .spoof
            .indicator
            .parse()
            .map_err(|e: xebspoof::Error| CliError::Config(e.to_string()))?;
        if family != Family::Fock
            && matches!(
                indicator,
                IndicatorKind::MultinomialMixed | IndicatorKind::MultinomialSuperposition
            )
        {
            return bad(format!("indicator {indicator} needs family fbs"));
        }
        let selection: Selection = self
            .spoof
            .selection
            .parse()
            .map_err(|e: xebspoof::Error| CliError::Config(e.to_string()))?;
        if self.metrics.variants.is_empty() {
            return bad("metrics.variants must not be empty".into());
        }
        let variants = self
            .metrics
            .variants
            .iter()
            .map(|v| v.parse().map_err(|e: xebspoof::Error| CliError::Config(e.to_string())))
            .collect::<Result<Vec<XeVariant>>>()?;
        let reference = match self.metrics.reference.as_str() {
            "exact" => Reference::Exact,
            "sampled" => Reference::Sampled,
            "auto" => Reference::Auto,
            other => return bad(format!("unknown reference {other:?} (expected exact | sampled | auto)")),
        };
        if self.outputs.histogram_bins == 0 {
            return bad("outputs.histogram_bins must be >= 1".into());
        }
        Ok(Plan {
            family,
            sampler,
            indicator,
            selection,
            variants,
            normalize: self.metrics.normalize.unwrap_or(family == Family::Gaussian),
            reference,
            max_sector: self.max_sector.map_or(ENUMERATION_CAP, u128::from),
        })
    }
}

/// Settings of the `theory-check` suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryConfig {
    pub name: String,
    pub seed: u64,
    /// Overrides every Monte Carlo trial count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

impl TheoryConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.trials == Some(0) {
            return Err(CliError::Config("trials must be >= 1".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = r#"
name = "fig2"
seed = 0

[model]
family = "gbs"
modes = 16
particles = [4]
mean_photons = 4.0

[spoof]
k = [1, 10, 100, 1000]
samples = 10000
"#;

    #[test]
    fn round_trip() {
        let cfg = ExperimentConfig::parse(FIG2).unwrap();
        let again = ExperimentConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash(), again.hash());
        let plan = cfg.plan().unwrap();
        assert!(plan.normalize);
        assert_eq!(plan.sampler, SamplerKind::Uniform);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = FIG2.replace("modes = 16", "modes = \"sixteen\"");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn unknown_names_are_config_errors() {
        for (from, to) in [
            ("family = \"gbs\"", "family = \"qaoa\""),
            ("samples = 10000", "samples = 10000\nindicator = \"multinomial-mixed\""),
            ("samples = 10000", "samples = 10000\nsampler = \"thermal\""),
            ("seed = 0", "seed = 0\ncolour = 1"),
            ("k = [1, 10, 100, 1000]", "k = [0]"),
        ] {
            let err = ExperimentConfig::parse(&FIG2.replace(from, to)).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{to}: {err}");
        }
    }
}
