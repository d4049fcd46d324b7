//! `bayes-check`: likelihood-ratio scores of mock-ups against ideal samples.
//!
//! Samples from the ideal distribution stand in for experimental data.
//! Probabilities are normalized over the sector.

use xebspoof::metrics::{bayesian_score, exact_xe, XeVariant};
use xebspoof::mockups::{ExactSampler, Indicator, IndicatorKind};
use xebspoof::models::SectorDistribution;
use xebspoof::Seed;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::manifest::SeedEntry;
use crate::output::{num, OutputDir, Table};
use crate::Check;

#[derive(Debug, Clone, PartialEq)]
pub struct BayesRow {
    /// `ideal`, `p^2`, `uniform` or `marginal`.
    pub mockup: &'static str,
    pub exact_xe: f64,
    pub ideal_xe: f64,
    pub score: f64,
    pub std_error: f64,
    /// `KL(p || q)`, the expected score.
    pub kl: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Default)]
pub struct BayesRun {
    pub rows: Vec<BayesRow>,
    pub checks: Vec<Check>,
    pub seeds: Vec<SeedEntry>,
}

impl BayesRun {
    pub fn row(&self, mockup: &str) -> Option<&BayesRow> {
        self.rows.iter().find(|r| r.mockup == mockup)
    }
}

fn kl(p: &SectorDistribution, q: &SectorDistribution) -> f64 {
    xebspoof::sum::sum(
        p.weights()
            .iter()
            .zip(q.weights())
            .filter(|(pw, _)| **pw > 0.0)
            .map(|(pw, qw)| pw * (pw / qw).ln()),
    )
}

pub fn run_bayes(cfg: &ExperimentConfig) -> Result<BayesRun> {
    let plan = cfg.plan()?;
    let particles = cfg.model.particles[0];
    let root = Seed::new(cfg.seed);
    let (model, circuit) = crate::spoof_run::model_for(cfg, &plan, 0, particles, &root)?;
    let sector = model.sector(particles)?;
    sector
        .check_enumerable(plan.max_sector)
        .map_err(|e| CliError::Resource(e.to_string()))?;
    let p = SectorDistribution::from_model(&model, sector)?.normalized()?;
    let seed = root.child_named("ideal");
    let samples = ExactSampler::new(&p)?.sample(cfg.spoof.samples, &seed);
    let ideal_xe = exact_xe(&p, &p, XeVariant::Log)?;

    let marginal = Indicator::build(IndicatorKind::MarginalProduct, &model, sector)?;
    let marginal_scores: Vec<f64> = p
        .outcomes()
        .iter()
        .map(|x| marginal.score(x))
        .collect::<xebspoof::Result<_>>()?;
    let mockups: Vec<(&'static str, SectorDistribution)> = vec![
        ("ideal", p.clone()),
        ("p^2", p.map(|w| w * w)?.normalized()?),
        (
            "uniform",
            SectorDistribution::from_scores(sector, |_| 1.0)?.normalized()?,
        ),
        (
            "marginal",
            SectorDistribution::from_scores(sector, |x| marginal_scores[p.position(x).expect("same sector")])?
                .normalized()?,
        ),
    ];

    let mut run = BayesRun {
        seeds: vec![
            SeedEntry {
                task: "circuit".into(),
                seed: circuit.to_string(),
            },
            SeedEntry {
                task: "ideal samples".into(),
                seed: seed.to_string(),
            },
        ],
        ..Default::default()
    };
    for (name, q) in &mockups {
        let score = bayesian_score(&samples, &p, q)?;
        run.rows.push(BayesRow {
            mockup: name,
            exact_xe: exact_xe(&p, q, XeVariant::Log)?,
            ideal_xe,
            score: score.estimate,
            std_error: score.std_error,
            kl: kl(&p, q),
            samples: score.samples,
        });
    }

    let r = |m| run.row(m).expect("present").clone();
    let (ideal, squared, uniform, marginal) = (r("ideal"), r("p^2"), r("uniform"), r("marginal"));
    run.checks = vec![
        Check::new(
            "q=p score is zero",
            ideal.score.abs() <= 3.0 * ideal.std_error + 1e-12,
            format!("score {}", num(ideal.score)),
        ),
        Check::new(
            "q∝p^2 exact XE above ideal",
            squared.exact_xe > squared.ideal_xe,
            format!("{} > {}", num(squared.exact_xe), num(squared.ideal_xe)),
        ),
        Check::new(
            "q∝p^2 score positive (4σ)",
            squared.score > 4.0 * squared.std_error,
            format!("{} ± {}", num(squared.score), num(squared.std_error)),
        ),
        Check::new(
            "q=uniform score matches KL (3σ)",
            (uniform.score - uniform.kl).abs() < 3.0 * uniform.std_error,
            format!("{} vs KL {}", num(uniform.score), num(uniform.kl)),
        ),
        Check::new(
            "q=marginal score above -4σ",
            marginal.score > -4.0 * marginal.std_error,
            format!("{} ± {}", num(marginal.score), num(marginal.std_error)),
        ),
    ];
    Ok(run)
}

pub fn write_bayes(run: &BayesRun, cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let mut t = Table::new(vec![
        "mockup",
        "exact_xe",
        "ideal_xe",
        "bayes_score",
        "std_error",
        "kl",
        "samples",
        "config_hash",
    ]);
    let hash = cfg.hash();
    for r in &run.rows {
        t.push(vec![
            r.mockup.to_string(),
            num(r.exact_xe),
            num(r.ideal_xe),
            num(r.score),
            num(r.std_error),
            num(r.kl),
            r.samples.to_string(),
            hash.clone(),
        ]);
    }
    out.write_table("bayes.csv", &t)?;
    out.write_table("checks.csv", &crate::checks_table(&run.checks))
}
