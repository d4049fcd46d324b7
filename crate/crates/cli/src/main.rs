use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xebspoof_cli::commands::{execute, rerun, resolve, Finished, Overrides};
use xebspoof_cli::config::{ExperimentConfig, TheoryConfig};
use xebspoof_cli::recipes::{recipe, Job, RECIPES};
use xebspoof_cli::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "xebspoof",
    version,
    about = "Heavy-outcome spoofing of cross-entropy benchmarks"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Override the root seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = "XEBSPOOF_OUT")]
    out: Option<PathBuf>,
    /// Largest sector enumerated for exact references.
    #[arg(long)]
    max_sector: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the spoofer and XE estimates described by a config file.
    SpoofRun {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check closed-form XE expectations against Monte Carlo.
    TheoryCheck {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Trials per Monte Carlo row.
        #[arg(long)]
        trials: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Bayesian score and exact XE for several mockups.
    BayesCheck {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Fermion-sampling scaling run (ΔXE against N).
    FsScale {
        /// Config file; defaults to the fig4 recipe.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        trials: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a built-in figure recipe.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(RECIPES))]
        recipe: String,
        /// Reduced sample counts and grids.
        #[arg(long)]
        quick: bool,
        /// Print the recipe config and exit.
        #[arg(long)]
        print_config: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Re-run a manifest and compare every output byte for byte.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, env = "XEBSPOOF_OUT")]
        out: Option<PathBuf>,
    },
}

fn overrides(common: Common, trials: Option<usize>) -> Overrides {
    Overrides {
        seed: common.seed,
        out: common.out,
        max_sector: common.max_sector,
        trials,
    }
}

fn finish(done: Finished) -> Result<()> {
    print!("{}", done.report);
    println!(
        "wrote {} files to {}",
        done.manifest.outputs.len() + 1,
        done.dir.display()
    );
    let failed = done.failures();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Tolerance(format!(
            "{} check(s) failed: {}",
            failed.len(),
            failed.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join("; ")
        )))
    }
}

fn run_job(job: Job, o: Overrides) -> Result<()> {
    let (job, dir) = resolve(job, &o);
    finish(execute(&job, &dir)?)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::SpoofRun { config, common } => {
            run_job(Job::Spoof(ExperimentConfig::load(&config)?), overrides(common, None))
        }
        Command::BayesCheck { config, common } => {
            run_job(Job::Bayes(ExperimentConfig::load(&config)?), overrides(common, None))
        }
        Command::TheoryCheck { config, trials, common } => {
            let cfg = match config {
                Some(path) => TheoryConfig::load(&path)?,
                None => match recipe("theory", false)? {
                    Job::Theory(c) => c,
                    _ => unreachable!(),
                },
            };
            run_job(Job::Theory(cfg), overrides(common, trials))
        }
        Command::FsScale {
            config,
            quick,
            trials,
            common,
        } => {
            let job = match config {
                Some(path) => Job::Spoof(ExperimentConfig::load(&path)?),
                None => recipe("fig4", quick)?,
            };
            run_job(job, overrides(common, trials))
        }
        Command::Reproduce {
            recipe: name,
            quick,
            print_config,
            common,
        } => {
            let job = recipe(&name, quick)?;
            if print_config {
                print!("{}", job.config_toml());
                return Ok(());
            }
            run_job(job, overrides(common, None))
        }
        Command::Rerun { manifest, out } => {
            let (done, mismatches) = rerun(&manifest, out)?;
            if !mismatches.is_empty() {
                return Err(CliError::Tolerance(format!(
                    "outputs differ from the manifest: {}",
                    mismatches.join(", ")
                )));
            }
            println!(
                "{} outputs byte-identical to {}",
                done.manifest.outputs.len(),
                manifest.display()
            );
            finish(done)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
