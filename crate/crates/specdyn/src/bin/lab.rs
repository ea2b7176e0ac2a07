//! Command-line driver for the spectral-dynamics laboratory.
//!
//! Exit codes: 0 success, 2 configuration/parse error, 3 numerical
//! failure, 4 verification failure.

// `!(x >= 0.0)` rejects NaN as well as negatives.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use specdyn::config::ExperimentConfig;
use specdyn::error::Error;
use specdyn::run::{report, run_experiment, RunManifest, StageSet};

#[derive(Parser)]
#[command(name = "lab", version, about = "spectral dimension and transport experiments")]
struct Cli {
    /// Path to an experiment config (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Replace the config's seed list with a single seed
    #[arg(long, global = true)]
    seed_override: Option<u64>,

    /// Override the config's output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (accepted for interface stability; execution is
    /// single-threaded)
    #[arg(long, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the model and eigensystem cache only
    Model,
    /// Run the dimension-estimation stages
    Dims,
    /// Run the moment/transport stages
    Transport,
    /// Run the weakly-spaced selection stage
    Spacing,
    /// Run the designed-initial-state construction stage
    Construct,
    /// Re-run verification on an existing output directory
    Verify {
        /// Directory containing manifest.json
        dir: PathBuf,
    },
    /// Render summary tables and plot data from an existing run
    Report {
        /// Directory containing manifest.json
        dir: PathBuf,
    },
    /// Run a fast built-in consistency check
    Selftest,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config {
        path: "-".into(),
        message: "--config PATH is required for this subcommand".into(),
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut cfg = ExperimentConfig::from_toml(&text).map_err(|e| Error::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    if let Some(seed) = cli.seed_override {
        cfg.seeds = vec![seed];
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::Parse(_) | Error::Io(_) | Error::Domain(_) => 2,
        Error::InvalidConstruction(_) | Error::MissingStage(_) => 4,
        _ => 3,
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    if cli.threads == 0 {
        return Err(Error::Domain("--threads must be at least 1".into()));
    }
    match &cli.command {
        Command::Model => {
            let cfg = load_config(cli)?;
            let manifest = run_experiment(&cfg, StageSet::only_model())?;
            println!("model: {} files in {}", manifest.files.len(), manifest.output_dir.display());
        }
        Command::Dims => {
            let cfg = load_config(cli)?;
            let mut stages = StageSet::only_model();
            stages.dims = true;
            let manifest = run_experiment(&cfg, stages)?;
            println!("dims: {} files in {}", manifest.files.len(), manifest.output_dir.display());
        }
        Command::Transport => {
            let cfg = load_config(cli)?;
            let mut stages = StageSet::only_model();
            stages.transport = true;
            let manifest = run_experiment(&cfg, stages)?;
            for (seed, qb) in &manifest.quasiballistic {
                println!("seed {seed}: quasiballistic = {qb}");
            }
        }
        Command::Spacing => {
            let cfg = load_config(cli)?;
            if cfg.spacing.is_none() {
                return Err(Error::Config {
                    path: cli.config.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
                    message: "config has no [spacing] section".into(),
                });
            }
            let mut stages = StageSet::only_model();
            stages.spacing = true;
            let manifest = run_experiment(&cfg, stages)?;
            println!("spacing: {} files in {}", manifest.files.len(), manifest.output_dir.display());
        }
        Command::Construct => {
            let cfg = load_config(cli)?;
            let mut stages = StageSet::only_model();
            stages.construct = true;
            let manifest = run_experiment(&cfg, stages)?;
            println!("construct: {} files in {}", manifest.files.len(), manifest.output_dir.display());
        }
        Command::Verify { dir } => {
            let manifest = RunManifest::load(&dir.join("manifest.json"))?;
            manifest.verify_files()?;
            for (seed, qb) in &manifest.quasiballistic {
                if !qb {
                    println!("seed {seed}: not quasiballistic");
                }
            }
            println!("verify: {} files consistent with config {}", manifest.files.len(), manifest.config_hash);
        }
        Command::Report { dir } => {
            let manifest = RunManifest::load(&dir.join("manifest.json"))?;
            let summary = report(&manifest)?;
            print!("{summary}");
        }
        Command::Selftest => {
            selftest()?;
            println!("selftest: ok");
        }
    }
    Ok(())
}

/// A quick end-to-end sanity check on a small free model: eigensystem
/// residuals, measure normalization, and moment positivity.
fn selftest() -> Result<(), Error> {
    use specdyn::dynamics::{moments, IndexMap, MomentOptions};
    use specdyn::eigen::eigensolve;
    use specdyn::hamiltonian::{build_hamiltonian, ModelFamily, ModelSpec};
    use specdyn::spectral::spectral_measure;

    let spec = ModelSpec {
        family: ModelFamily::Free,
        size: 64,
        index_origin: None,
    };
    let t = build_hamiltonian(&spec)?;
    let eig = eigensolve(&t)?;
    let defect = eig.orthonormality_defect();
    if defect > 1e-9 {
        return Err(Error::Numerical {
            context: "selftest orthonormality",
            achieved: defect,
            wanted: 1e-9,
        });
    }
    let mut xi = vec![0.0; spec.size];
    xi[spec.origin()] = 1.0;
    let mu = spectral_measure(&eig, &xi)?;
    if (mu.total_mass() - 1.0).abs() > 1e-10 {
        return Err(Error::Numerical {
            context: "selftest measure mass",
            achieved: mu.total_mass(),
            wanted: 1.0,
        });
    }
    let map = IndexMap::centered(spec.size, spec.origin());
    let series = moments(
        &eig,
        &xi,
        &[2.0],
        &[1.0, 4.0, 16.0],
        &map,
        &MomentOptions::default(),
    )?;
    if series.moments.iter().any(|row| row.iter().any(|&m| !(m >= 0.0))) {
        return Err(Error::Numerical {
            context: "selftest moment positivity",
            achieved: f64::NAN,
            wanted: 0.0,
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lab: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
