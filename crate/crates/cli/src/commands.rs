//! Job execution: resolve overrides, run, write outputs and the manifest.

use std::path::{Path, PathBuf};

use crate::bayes::{run_bayes, write_bayes};
use crate::error::{CliError, Result};
use crate::manifest::{unix_now, Manifest, SeedEntry, MANIFEST_FILE};
use crate::output::OutputDir;
use crate::recipes::Job;
use crate::spoof_run::{run_spoof, write_spoof};
use crate::theory_check::{render, run_theory, write_theory};
use crate::Check;

/// Command-line overrides applied on top of a configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub max_sector: Option<u64>,
    pub trials: Option<usize>,
}

/// What a finished job left behind.
#[derive(Debug)]
pub struct Finished {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub checks: Vec<Check>,
    /// Text for the terminal.
    pub report: String,
}

impl Finished {
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Apply overrides and return the job together with its output directory.
pub fn resolve(job: Job, o: &Overrides) -> (Job, PathBuf) {
    let mut job = job;
    let configured = match &mut job {
        Job::Spoof(c) | Job::Bayes(c) => {
            if let Some(s) = o.seed {
                c.seed = s;
            }
            if let Some(m) = o.max_sector {
                c.max_sector = Some(m);
            }
            if let Some(t) = o.trials {
                c.trials = t;
            }
            c.output.take()
        }
        Job::Theory(c) => {
            if let Some(s) = o.seed {
                c.seed = s;
            }
            if let Some(t) = o.trials {
                c.trials = Some(t);
            }
            None
        }
    };
    let dir = o
        .out
        .clone()
        .or(configured)
        .unwrap_or_else(|| Path::new("out").join(job.name()));
    (job, dir)
}

/// Run `job` into `dir`, writing outputs and `manifest.json`.
pub fn execute(job: &Job, dir: &Path) -> Result<Finished> {
    let started = unix_now();
    let mut out = OutputDir::create(dir)?;
    let mut checks = Vec::new();
    let mut report = String::new();
    let seeds: Vec<SeedEntry> = match job {
        Job::Spoof(cfg) => {
            let run = run_spoof(cfg)?;
            write_spoof(&run, cfg, &mut out)?;
            for r in &run.xe {
                report.push_str(&format!(
                    "trial {} N={} {:<13} k={:<5} {:<6} XE {:>12.6} ± {:.6}\n",
                    r.trial,
                    r.particles,
                    r.source,
                    r.k.map_or_else(|| "-".to_string(), |k| k.to_string()),
                    r.variant,
                    r.estimate,
                    r.std_error
                ));
            }
            run.seeds
        }
        Job::Bayes(cfg) => {
            let run = run_bayes(cfg)?;
            write_bayes(&run, cfg, &mut out)?;
            for r in &run.rows {
                report.push_str(&format!(
                    "{:<9} exact XE {:>10.6} (ideal {:>10.6})  score {:>10.6} ± {:.6}  KL {:.6}\n",
                    r.mockup, r.exact_xe, r.ideal_xe, r.score, r.std_error, r.kl
                ));
            }
            checks = run.checks;
            run.seeds
        }
        Job::Theory(cfg) => {
            let rows = run_theory(cfg)?;
            write_theory(&rows, cfg, &mut out)?;
            report = render(&rows);
            checks = rows
                .iter()
                .map(|r| Check::new(&format!("{} {}", r.check, r.params), r.passed, String::new()))
                .collect();
            vec![SeedEntry {
                task: "suite".into(),
                seed: cfg.seed.to_string(),
            }]
        }
    };
    for c in &checks {
        report.push_str(&format!(
            "[{}] {} {}\n",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: job.command().into(),
        config: job.config_toml(),
        config_hash: job.config_hash(),
        started_unix: started,
        finished_unix: unix_now(),
        seeds,
        outputs: out.files().to_vec(),
    };
    let path = dir.join(MANIFEST_FILE);
    std::fs::write(&path, manifest.to_json()).map_err(CliError::io(&path))?;
    Ok(Finished {
        dir: dir.to_path_buf(),
        manifest,
        checks,
        report,
    })
}

/// Re-run a manifest into `dir` and compare every output byte for byte.
pub fn rerun(manifest_path: &Path, dir: Option<PathBuf>) -> Result<(Finished, Vec<String>)> {
    let original = Manifest::load(manifest_path)?;
    let job = Job::from_manifest(&original.command, &original.config)?;
    let dir = dir.unwrap_or_else(|| {
        let parent = manifest_path.parent().unwrap_or(Path::new("."));
        let name = parent
            .file_name()
            .map_or_else(|| "run".into(), |n| n.to_string_lossy().into_owned());
        parent.with_file_name(format!("{name}-rerun"))
    });
    let finished = execute(&job, &dir)?;
    let mismatches = original.mismatches(&finished.manifest.outputs);
    Ok((finished, mismatches))
}
