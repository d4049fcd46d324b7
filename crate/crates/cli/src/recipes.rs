//! Built-in experiment recipes, one per reproduced figure.
//!
//! `quick` variants shrink sample counts, grids and trial counts so a
//! recipe finishes in seconds; they exercise the same code paths.

use crate::config::{ExperimentConfig, MetricsSection, ModelConfig, OutputSection, SpoofSection, TheoryConfig};
use crate::error::{CliError, Result};

/// A runnable job and its configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Spoof(ExperimentConfig),
    Bayes(ExperimentConfig),
    Theory(TheoryConfig),
}

impl Job {
    pub fn command(&self) -> &'static str {
        match self {
            Job::Spoof(_) => "spoof-run",
            Job::Bayes(_) => "bayes-check",
            Job::Theory(_) => "theory-check",
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Job::Spoof(c) | Job::Bayes(c) => &c.name,
            Job::Theory(c) => &c.name,
        }
    }

    pub fn config_toml(&self) -> String {
        match self {
            Job::Spoof(c) | Job::Bayes(c) => c.to_toml(),
            Job::Theory(c) => c.to_toml(),
        }
    }

    pub fn config_hash(&self) -> String {
        match self {
            Job::Spoof(c) | Job::Bayes(c) => c.hash(),
            Job::Theory(c) => c.hash(),
        }
    }

    /// Rebuild a job from a manifest's command and configuration text.
    pub fn from_manifest(command: &str, config: &str) -> Result<Self> {
        match command {
            "spoof-run" => ExperimentConfig::parse(config).map(Job::Spoof),
            "bayes-check" => ExperimentConfig::parse(config).map(Job::Bayes),
            "theory-check" => TheoryConfig::parse(config).map(Job::Theory),
            other => Err(CliError::Config(format!("unknown manifest command {other:?}"))),
        }
    }
}

pub const RECIPES: &[&str] = &[
    "fig2", "fig3", "fig4", "fig5", "figS2", "figS3", "figS4", "figS5", "figS6", "theory",
];

/// Root seed shared by every recipe.
pub const RECIPE_SEED: u64 = 0;

fn small_sector(name: &str, family: &str, indicator: &str, sampler: &str, quick: bool) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        seed: RECIPE_SEED,
        trials: 1,
        output: None,
        max_sector: None,
        model: ModelConfig {
            family: family.into(),
            modes: Some(16),
            modes_per_particle: None,
            particles: vec![4],
            mean_photons: (family == "gbs").then_some(4.0),
            squeezed_modes: None,
        },
        spoof: SpoofSection {
            k: if quick {
                vec![1, 10, 100]
            } else {
                vec![1, 10, 100, 1000]
            },
            samples: if quick { 1000 } else { 10_000 },
            total_samples: None,
            sampler: sampler.into(),
            indicator: indicator.into(),
            selection: "batch".into(),
        },
        metrics: MetricsSection::default(),
        outputs: OutputSection::default(),
    }
}

pub fn recipe(name: &str, quick: bool) -> Result<Job> {
    Ok(match name {
        // GBS, 16 modes, all squeezed with 4 mean photons in total.
        "fig2" => Job::Spoof(small_sector("fig2", "gbs", "marginal", "uniform", quick)),
        // Reduced multi-sector GBS at the squeezing r = 0.53 per mode.
        "fig3" => {
            let modes = if quick { 10 } else { 16 };
            let mut c = small_sector("fig3", "gbs", "marginal", "uniform", quick);
            c.model.modes = Some(modes);
            c.model.mean_photons = Some(modes as f64 * 0.53f64.sinh().powi(2));
            c.model.particles = if quick { vec![2, 4] } else { vec![2, 4, 6, 8] };
            c.spoof.k = if quick { vec![1, 10] } else { vec![1, 10, 100] };
            c.spoof.total_samples = Some(if quick { 500 } else { 4000 });
            c.outputs.samples = false;
            Job::Spoof(c)
        }
        // FS scaling with M = 10 N.
        "fig4" => {
            let mut c = small_sector("fig4", "fs", "marginal", "uniform", quick);
            c.model.modes = None;
            c.model.modes_per_particle = Some(10);
            c.model.particles = if quick { vec![5, 10] } else { vec![10, 30, 60] };
            c.spoof.k = if quick { vec![1, 10] } else { vec![1, 10, 100] };
            c.spoof.samples = if quick { 200 } else { 1000 };
            c.trials = if quick { 3 } else { 50 };
            c.metrics.reference = "sampled".into();
            c.outputs.samples = false;
            Job::Spoof(c)
        }
        "fig5" => {
            let mut c = small_sector("fig5", "gbs", "marginal", "uniform", quick);
            c.spoof.k = vec![1];
            Job::Bayes(c)
        }
        "figS2" => Job::Spoof(small_sector("figS2", "fbs", "marginal", "uniform", quick)),
        "figS3" => Job::Spoof(small_sector("figS3", "fbs", "multinomial-mixed", "uniform", quick)),
        "figS4" => Job::Spoof(small_sector("figS4", "fbs", "multinomial-sup", "uniform", quick)),
        // FS with the marginal-product distribution as sampler.
        "figS5" => Job::Spoof(small_sector("figS5", "fs", "marginal", "marginal", quick)),
        "figS6" => {
            let mut c = small_sector("figS6", "gbs", "marginal", "uniform", quick);
            c.metrics.variants = vec!["log".into(), "linear".into()];
            Job::Spoof(c)
        }
        "theory" => Job::Theory(TheoryConfig {
            name: "theory".into(),
            seed: RECIPE_SEED,
            // The suite takes seconds; quick mode runs it unchanged.
            trials: None,
        }),
        other => {
            return Err(CliError::Config(format!(
                "unknown recipe {other:?} (expected one of {})",
                RECIPES.join(", ")
            )))
        }
    })
}
