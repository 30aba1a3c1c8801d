use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use empirw_core::harness::{
    clt_experiment, load_configs, predict, run_experiment, sample_measure, validate, write_predictions_csv,
    write_results_csv, ExperimentConfig,
};
use empirw_core::spectral::ModelRegistry;

/// Empirical-measure Wasserstein convergence experiments.
#[derive(Parser)]
#[command(name = "empirw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON file with one experiment object or a list of them.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the master seed of every config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Limit constants and rate regimes → predictions.csv.
    Predict(Common),
    /// One replica per horizon → measure and coefficient CSVs.
    Simulate(Common),
    /// Replica experiments with rate fits → results.csv, report.json.
    Experiment(Common),
    /// CLT scale of one mode → results.csv, report.json.
    Clt {
        #[command(flatten)]
        common: Common,
        /// Mode index (default: `clt_mode` of each config).
        #[arg(long)]
        mode: Option<usize>,
    },
    /// Self-check suites → ledger.json; exit code 1 on any failure.
    Validate(Common),
}

fn setup(common: &Common) -> Result<Vec<ExperimentConfig>> {
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    let mut cfgs = load_configs(&common.config).with_context(|| format!("reading {}", common.config.display()))?;
    if let Some(seed) = common.seed {
        for c in &mut cfgs {
            c.seed = seed;
        }
    }
    fs::create_dir_all(&common.out).with_context(|| format!("creating {}", common.out.display()))?;
    Ok(cfgs)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_json(dir: &Path, name: &str, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer_pretty(create(dir, name)?, value)?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Predict(common) => {
            let cfgs = setup(&common)?;
            let rows = cfgs.iter().map(predict).collect::<Result<Vec<_>, _>>()?;
            write_predictions_csv(&rows, create(&common.out, "predictions.csv")?)?;
            Ok(true)
        }
        Command::Simulate(common) => {
            let cfgs = setup(&common)?;
            let registry = ModelRegistry::default();
            for (i, cfg) in cfgs.iter().enumerate() {
                let model = registry.build(&cfg.model, &cfg.params)?;
                let modes = model.eigen_data(cfg.n_modes)?;
                for h in 0..cfg.horizons.len() {
                    let (_, emp) = sample_measure(cfg, h, 0)?;
                    emp.write_csv(create(&common.out, &format!("measure_{i}_{h}.csv"))?)?;
                    let coeffs = empirw_core::empirical::psi_from_measure(&emp, &modes)?;
                    coeffs.write_csv(create(&common.out, &format!("psi_{i}_{h}.csv"))?)?;
                }
            }
            Ok(true)
        }
        Command::Experiment(common) => {
            let cfgs = setup(&common)?;
            let reports = cfgs.iter().map(run_experiment).collect::<Result<Vec<_>, _>>()?;
            let rows: Vec<_> = reports.iter().flat_map(|r| r.rows()).collect();
            write_results_csv(&rows, create(&common.out, "results.csv")?)?;
            write_json(&common.out, "report.json", &reports)?;
            Ok(true)
        }
        Command::Clt { common, mode } => {
            let cfgs = setup(&common)?;
            let reports =
                cfgs.iter().map(|c| clt_experiment(c, mode.unwrap_or(c.clt_mode))).collect::<Result<Vec<_>, _>>()?;
            let rows: Vec<_> = reports.iter().flat_map(|r| r.rows()).collect();
            write_results_csv(&rows, create(&common.out, "results.csv")?)?;
            write_json(&common.out, "report.json", &reports)?;
            Ok(true)
        }
        Command::Validate(common) => {
            let cfgs = setup(&common)?;
            if cfgs.is_empty() {
                bail!("no configuration given");
            }
            let ledgers: Vec<_> = cfgs.iter().map(validate).collect();
            for l in &ledgers {
                for c in &l.checks {
                    println!("{} [{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.suite, c.name, c.detail);
                }
            }
            write_json(&common.out, "ledger.json", &ledgers)?;
            Ok(ledgers.iter().all(|l| l.passed()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
