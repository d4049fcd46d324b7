//! `spoof-run`: spoof every configured sector of every trial circuit and
//! compare against the ideal reference.
//!
//! Seeds derive from the root as follows (`t` trial, `N` particles):
//!
//! | stream | seed |
//! |---|---|
//! | circuit (gbs) | `circuit/t` |
//! | circuit (fbs, fs) | `circuit/t/N` |
//! | spoofer at rate `k` | `spoof/t/N/k` |
//! | uniform reference | `uniform/t/N` |
//! | ideal samples | `ideal/t/N` |

use std::collections::BTreeMap;

use rayon::prelude::*;
use xebspoof::kernels::{haar_isometry, haar_unitary};
use xebspoof::metrics::{
    exact_xe_normalized, heaviness_profile, lookup, xe_difference, xe_estimate, Normalization, XeReport, XeVariant,
};
use xebspoof::mockups::{sample_uniform, DppSampler, ExactSampler, SampleSet};
use xebspoof::models::{Family, FermionModel, FockModel, GaussianModel, Model, Outcome, SectorDistribution};
use xebspoof::spoofer::{allocate, spoof_sector, SpoofConfig};
use xebspoof::sum::mean_and_stderr;
use xebspoof::Seed;

use crate::config::{ExperimentConfig, Plan, Reference};
use crate::error::{CliError, Result};
use crate::manifest::SeedEntry;
use crate::output::{num, OutputDir, PlotData, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct XeRow {
    pub trial: usize,
    pub particles: usize,
    pub modes: usize,
    /// `spoof`, `uniform`, `ideal-exact` or `ideal-sampled`.
    pub source: &'static str,
    pub k: Option<usize>,
    pub variant: XeVariant,
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub ln_normalization: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRow {
    pub trial: usize,
    pub particles: usize,
    pub modes: usize,
    pub k: usize,
    pub variant: XeVariant,
    pub delta: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramRow {
    pub trial: usize,
    pub particles: usize,
    pub k: usize,
    pub sector_size: usize,
    pub counts: Vec<usize>,
    pub mass_top_decile: f64,
}

#[derive(Debug, Clone)]
pub struct SampleDump {
    pub trial: usize,
    pub particles: usize,
    pub k: usize,
    pub set: SampleSet,
    pub probabilities: Vec<f64>,
}

/// `(particles, modes, k, variant)`.
pub type SummaryKey = (usize, usize, usize, String);

#[derive(Debug, Clone, Default)]
pub struct SpoofRun {
    pub xe: Vec<XeRow>,
    pub deltas: Vec<DeltaRow>,
    pub histograms: Vec<HistogramRow>,
    pub samples: Vec<SampleDump>,
    pub seeds: Vec<SeedEntry>,
}

impl SpoofRun {
    /// The row of `source` (and rate `k` for spoof rows), if unique.
    pub fn find(
        &self,
        trial: usize,
        particles: usize,
        source: &str,
        k: Option<usize>,
        variant: XeVariant,
    ) -> Option<&XeRow> {
        self.xe.iter().find(|r| {
            r.trial == trial && r.particles == particles && r.source == source && r.k == k && r.variant == variant
        })
    }

    /// Trial-averaged `ΔXE`: `(mean, sample std dev, std error of the mean, trials)`
    /// keyed by `(particles, modes, k, variant)`.
    pub fn delta_summary(&self) -> BTreeMap<SummaryKey, (f64, f64, f64, usize)> {
        let mut groups: BTreeMap<SummaryKey, Vec<f64>> = BTreeMap::new();
        for d in &self.deltas {
            groups
                .entry((d.particles, d.modes, d.k, d.variant.to_string()))
                .or_default()
                .push(d.delta);
        }
        groups
            .into_iter()
            .map(|(key, v)| {
                let (mean, se) = mean_and_stderr(&v);
                let sd = se * (v.len() as f64).sqrt();
                (key, (mean, sd, se, v.len()))
            })
            .collect()
    }
}

pub(crate) fn model_for(
    cfg: &ExperimentConfig,
    plan: &Plan,
    trial: usize,
    particles: usize,
    root: &Seed,
) -> Result<(Model, Seed)> {
    let modes = cfg.modes_for(particles)?;
    let circuit = root.child_named("circuit").child(trial as u64);
    Ok(match plan.family {
        Family::Gaussian => {
            let u = haar_unitary(modes, &circuit)?;
            let squeezed = cfg.model.squeezed_modes.unwrap_or(modes);
            let mean = cfg.model.mean_photons.expect("validated");
            let r = (mean / squeezed as f64).sqrt().asinh();
            let squeezing = (0..modes).map(|i| if i < squeezed { r } else { 0.0 }).collect();
            (Model::Gaussian(GaussianModel::new(u, squeezing)?), circuit)
        }
        Family::Fock => {
            let seed = circuit.child(particles as u64);
            let rows = haar_isometry(particles, modes, &seed)?;
            (Model::Fock(FockModel::from_rows(rows)?), seed)
        }
        Family::Fermion => {
            let seed = circuit.child(particles as u64);
            let rows = haar_isometry(particles, modes, &seed)?;
            (Model::Fermion(FermionModel::from_rows(rows)?), seed)
        }
    })
}

struct TrialOutput {
    xe: Vec<XeRow>,
    deltas: Vec<DeltaRow>,
    histograms: Vec<HistogramRow>,
    samples: Vec<SampleDump>,
    seeds: Vec<SeedEntry>,
}

fn sample_counts(cfg: &ExperimentConfig, model: &Model) -> Result<Vec<(usize, usize)>> {
    let sectors = &cfg.model.particles;
    match cfg.spoof.total_samples {
        None => Ok(sectors.iter().map(|&n| (n, cfg.spoof.samples)).collect()),
        Some(total) => {
            let max = *sectors.iter().max().expect("non-empty");
            let all = model.sector_weights(max);
            let weights: Vec<f64> = (0..=max)
                .map(|n| if sectors.contains(&n) { all[n] } else { 0.0 })
                .collect();
            let counts = allocate(&weights, total)?;
            Ok(sectors.iter().map(|&n| (n, counts[n])).collect())
        }
    }
}

fn run_trial(cfg: &ExperimentConfig, plan: &Plan, trial: usize) -> Result<TrialOutput> {
    let root = Seed::new(cfg.seed);
    let mut out = TrialOutput {
        xe: Vec::new(),
        deltas: Vec::new(),
        histograms: Vec::new(),
        samples: Vec::new(),
        seeds: Vec::new(),
    };
    // Gaussian circuits are shared by all sectors of a trial.
    let shared = if plan.family == Family::Gaussian {
        Some(model_for(cfg, plan, trial, cfg.model.particles[0], &root)?)
    } else {
        None
    };
    let counts = match &shared {
        Some((model, _)) => sample_counts(cfg, model)?,
        None => cfg.model.particles.iter().map(|&n| (n, cfg.spoof.samples)).collect(),
    };
    for (particles, count) in counts {
        if count == 0 {
            continue;
        }
        let (model, circuit_seed) = match &shared {
            Some(m) => m.clone(),
            None => model_for(cfg, plan, trial, particles, &root)?,
        };
        let modes = model.modes();
        let sector = model.sector(particles)?;
        let task = |what: &str| format!("trial={trial} particles={particles} {what}");
        out.seeds.push(SeedEntry {
            task: task("circuit"),
            seed: circuit_seed.to_string(),
        });
        let norm = if plan.normalize {
            Normalization::for_sector(&model, sector)?
        } else {
            Normalization::none()
        };
        let enumerable = sector.check_enumerable(plan.max_sector).is_ok();
        let reference = match (plan.reference, enumerable) {
            (Reference::Exact, false) => {
                return Err(CliError::Resource(format!(
                    "exact reference needs an enumerable sector; {:?} exceeds the cap {}",
                    sector, plan.max_sector
                )))
            }
            (Reference::Exact, true) | (Reference::Auto, true) => Reference::Exact,
            _ => Reference::Sampled,
        };
        let dist = if enumerable {
            Some(SectorDistribution::from_model(&model, sector)?)
        } else {
            None
        };
        let report = |set: &SampleSet, variant: XeVariant| -> Result<XeReport> {
            Ok(match &dist {
                Some(p) => xe_estimate(set, lookup(p), variant, norm)?,
                None => xe_estimate(set, |x: &Outcome| model.probability(x), variant, norm)?,
            })
        };
        let row = |source: &'static str, k: Option<usize>, r: &XeReport| XeRow {
            trial,
            particles,
            modes,
            source,
            k,
            variant: r.variant,
            estimate: r.estimate,
            std_error: r.std_error,
            samples: r.samples,
            ln_normalization: norm.ln_value(),
        };

        // Ideal reference.
        let mut reference_reports: Vec<(XeVariant, f64, Option<XeReport>)> = Vec::new();
        match reference {
            Reference::Exact => {
                let p = dist.as_ref().expect("enumerable");
                let pn = p.normalized()?;
                for &v in &plan.variants {
                    let value = exact_xe_normalized(p, &pn, v, norm)?;
                    out.xe.push(XeRow {
                        trial,
                        particles,
                        modes,
                        source: "ideal-exact",
                        k: None,
                        variant: v,
                        estimate: value,
                        std_error: 0.0,
                        samples: 0,
                        ln_normalization: norm.ln_value(),
                    });
                    reference_reports.push((v, value, None));
                }
            }
            _ => {
                let seed = root.child_named("ideal").child(trial as u64).child(particles as u64);
                out.seeds.push(SeedEntry {
                    task: task("ideal samples"),
                    seed: seed.to_string(),
                });
                let set = match (&model, &dist) {
                    (Model::Fermion(f), _) => DppSampler::new(f).sample(count, &seed)?,
                    (_, Some(p)) => ExactSampler::new(p)?.sample(count, &seed),
                    _ => {
                        return Err(CliError::Resource(format!(
                            "ideal samples for {} need an enumerable sector",
                            plan.family
                        )))
                    }
                };
                for &v in &plan.variants {
                    let r = report(&set, v)?;
                    out.xe.push(row("ideal-sampled", None, &r));
                    reference_reports.push((v, r.estimate, Some(r)));
                }
            }
        }

        // Uniform reference.
        let seed = root.child_named("uniform").child(trial as u64).child(particles as u64);
        out.seeds.push(SeedEntry {
            task: task("uniform"),
            seed: seed.to_string(),
        });
        let uniform = sample_uniform(sector, count, &seed);
        for &v in &plan.variants {
            out.xe.push(row("uniform", None, &report(&uniform, v)?));
        }

        for &k in &cfg.spoof.k {
            let seed = root
                .child_named("spoof")
                .child(trial as u64)
                .child(particles as u64)
                .child(k as u64);
            out.seeds.push(SeedEntry {
                task: task(&format!("spoof k={k}")),
                seed: seed.to_string(),
            });
            let mut spoof = SpoofConfig::new(k, count, plan.sampler, plan.indicator, seed);
            spoof.selection = plan.selection;
            let set = spoof_sector(&spoof, sector, &model)?;
            for (v, ref_value, ref_report) in &reference_reports {
                let r = report(&set, *v)?;
                out.xe.push(row("spoof", Some(k), &r));
                let (delta, std_error) = match ref_report {
                    Some(rr) => {
                        let d = xe_difference(&r, rr)?;
                        (d.value, d.std_error)
                    }
                    None => (r.estimate - ref_value, r.std_error),
                };
                out.deltas.push(DeltaRow {
                    trial,
                    particles,
                    modes,
                    k,
                    variant: *v,
                    delta,
                    std_error,
                });
            }
            if let Some(p) = &dist {
                let profile = heaviness_profile(&set, p)?;
                out.histograms.push(HistogramRow {
                    trial,
                    particles,
                    k,
                    sector_size: profile.sector_size,
                    counts: profile.histogram(cfg.outputs.histogram_bins),
                    mass_top_decile: profile.mass_in_top(0.1),
                });
            }
            if cfg.outputs.samples {
                let probabilities = set
                    .outcomes
                    .iter()
                    .map(|x| match &dist {
                        Some(p) => lookup(p)(x),
                        None => model.probability(x),
                    })
                    .collect::<xebspoof::Result<Vec<f64>>>()?;
                out.samples.push(SampleDump {
                    trial,
                    particles,
                    k,
                    set,
                    probabilities,
                });
            }
        }
    }
    Ok(out)
}

/// Run the whole experiment in memory.
pub fn run_spoof(cfg: &ExperimentConfig) -> Result<SpoofRun> {
    let plan = cfg.plan()?;
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, &plan, t))
        .collect::<Result<Vec<_>>>()?;
    let mut run = SpoofRun::default();
    for t in trials {
        run.xe.extend(t.xe);
        run.deltas.extend(t.deltas);
        run.histograms.extend(t.histograms);
        run.samples.extend(t.samples);
        run.seeds.extend(t.seeds);
    }
    Ok(run)
}

fn opt(k: Option<usize>) -> String {
    k.map_or_else(String::new, |k| k.to_string())
}

/// Write tables, plot data and sample files for a finished run.
pub fn write_spoof(run: &SpoofRun, cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let hash = cfg.hash();
    let mut xe = Table::new(vec![
        "trial",
        "particles",
        "modes",
        "source",
        "k",
        "variant",
        "estimate",
        "std_error",
        "samples",
        "ln_normalization",
        "config_hash",
    ]);
    for r in &run.xe {
        xe.push(vec![
            r.trial.to_string(),
            r.particles.to_string(),
            r.modes.to_string(),
            r.source.to_string(),
            opt(r.k),
            r.variant.to_string(),
            num(r.estimate),
            num(r.std_error),
            r.samples.to_string(),
            num(r.ln_normalization),
            hash.clone(),
        ]);
    }
    out.write_table("xe.csv", &xe)?;

    let mut delta = Table::new(vec![
        "trial",
        "particles",
        "modes",
        "k",
        "variant",
        "delta_xe",
        "std_error",
    ]);
    for d in &run.deltas {
        delta.push(vec![
            d.trial.to_string(),
            d.particles.to_string(),
            d.modes.to_string(),
            d.k.to_string(),
            d.variant.to_string(),
            num(d.delta),
            num(d.std_error),
        ]);
    }
    out.write_table("delta.csv", &delta)?;

    let summary = run.delta_summary();
    let mut table = Table::new(vec![
        "particles",
        "modes",
        "k",
        "variant",
        "mean_delta_xe",
        "std_dev",
        "std_error",
        "trials",
    ]);
    for ((n, m, k, v), (mean, sd, se, trials)) in &summary {
        table.push(vec![
            n.to_string(),
            m.to_string(),
            k.to_string(),
            v.clone(),
            num(*mean),
            num(*sd),
            num(*se),
            trials.to_string(),
        ]);
    }
    out.write_table("summary.csv", &table)?;

    // ΔXE against particle number, one file per (k, variant).
    let mut by_k: BTreeMap<(usize, String), Vec<Vec<f64>>> = BTreeMap::new();
    for ((n, _, k, v), (mean, sd, se, _)) in &summary {
        by_k.entry((*k, v.clone()))
            .or_default()
            .push(vec![*n as f64, *mean, *sd, *se]);
    }
    for ((k, v), rows) in by_k {
        out.write_plot(
            &format!("plots/delta_vs_n_k{k}_{v}"),
            &PlotData {
                title: format!("{} ΔXE ({v}) at k={k}", cfg.name),
                x_label: "particles".into(),
                y_label: "ΔXE".into(),
                columns: vec![
                    "particles".into(),
                    "mean_delta_xe".into(),
                    "std_dev".into(),
                    "std_error".into(),
                ],
                error_bars: vec![("mean_delta_xe".into(), "std_dev".into())],
                rows,
            },
        )?;
    }

    // Spoofer XE against k for trial 0, with references as constant columns.
    for &n in &cfg.model.particles {
        for v in &cfg.plan()?.variants {
            let pick = |src: &str| run.find(0, n, src, None, *v).map(|r| r.estimate);
            let (Some(reference), Some(uniform)) = (pick("ideal-exact").or(pick("ideal-sampled")), pick("uniform"))
            else {
                continue;
            };
            let rows: Vec<Vec<f64>> = cfg
                .spoof
                .k
                .iter()
                .filter_map(|&k| run.find(0, n, "spoof", Some(k), *v))
                .map(|r| vec![r.k.unwrap_or(0) as f64, r.estimate, r.std_error, reference, uniform])
                .collect();
            if rows.is_empty() {
                continue;
            }
            out.write_plot(
                &format!("plots/xe_vs_k_n{n}_{v}"),
                &PlotData {
                    title: format!("{} XE ({v}), {n} particles", cfg.name),
                    x_label: "k".into(),
                    y_label: "XE".into(),
                    columns: vec![
                        "k".into(),
                        "spoof_xe".into(),
                        "std_error".into(),
                        "ideal_xe".into(),
                        "uniform_xe".into(),
                    ],
                    error_bars: vec![("spoof_xe".into(), "std_error".into())],
                    rows,
                },
            )?;
        }
    }

    for h in &run.histograms {
        let bins = h.counts.len();
        let total: usize = h.counts.iter().sum();
        let rows = h
            .counts
            .iter()
            .enumerate()
            .map(|(b, &c)| vec![(b * h.sector_size / bins) as f64, c as f64, c as f64 / total as f64])
            .collect();
        out.write_plot(
            &format!("plots/rank_hist_t{}_n{}_k{}", h.trial, h.particles, h.k),
            &PlotData {
                title: format!(
                    "{} rank histogram, k={} (top-decile mass {})",
                    cfg.name,
                    h.k,
                    num(h.mass_top_decile)
                ),
                x_label: "rank under descending ideal probability".into(),
                y_label: "samples".into(),
                columns: vec!["rank_start".into(), "count".into(), "fraction".into()],
                error_bars: vec![],
                rows,
            },
        )?;
    }

    for s in &run.samples {
        let mut t = Table::new(vec!["index", "outcome", "log_h", "p"]);
        let scores = s.set.log_scores.as_deref();
        for (i, (x, p)) in s.set.outcomes.iter().zip(&s.probabilities).enumerate() {
            t.push(vec![
                i.to_string(),
                x.to_string(),
                scores.map_or_else(String::new, |sc| num(sc[i])),
                num(*p),
            ]);
        }
        out.write_table(&format!("samples/t{}_n{}_k{}.csv", s.trial, s.particles, s.k), &t)?;
    }
    Ok(())
}
