//! Command-line front end: train, experiment, analyze, summarize.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qmi::circuit::build_brickwall;
use qmi::infodyn::{mi_at_theta, SubsystemPartition};
use qmi::runner::{
    self, parse_aggregate_csv, run_experiment, run_training, summarize, RunConfig, ThetaSnapshot,
    TrendReport,
};
use qmi::Error;

#[derive(Parser)]
#[command(name = "qmi", version, about = "Variational quantum classifier training with subsystem mutual-information diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config file (.toml or .json)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's out-dir)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded training and write its CSV and final θ snapshot
    Train {
        #[command(flatten)]
        common: ConfigArgs,
        /// Seed (overrides the config's training seed)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a multi-seed experiment and write per-run CSVs, aggregate.csv
    /// and manifest.json
    Experiment {
        #[command(flatten)]
        common: ConfigArgs,
        /// Number of runs (overrides the config)
        #[arg(long)]
        runs: Option<usize>,
        /// Base seed (overrides the config)
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads, 0 = one per core (overrides the config)
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Mutual-information diagnostics of a saved θ snapshot
    Analyze {
        /// theta_<seed>.json written by `train`
        #[arg(long)]
        theta: PathBuf,
    },
    /// Trend report from an aggregate.csv
    Summarize {
        /// aggregate.csv written by `experiment`
        #[arg(long)]
        input: PathBuf,
        /// Minimum I(Mi:Mo) drop after the peak (bits) to flag two-phase
        #[arg(long, default_value_t = 0.02)]
        min_drop: f64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn out_dir(common: &ConfigArgs, config: &RunConfig) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| config.experiment.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("qmi_out"))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Train { common, seed } => {
            let config = RunConfig::from_path(&common.config)?;
            let seed = seed.unwrap_or(config.training.seed);
            let dir = out_dir(&common, &config);
            let output = run_training(&config, seed, &dir)?;
            let first = output.trace.records.first().expect("trace never empty");
            let last = output.trace.records.last().expect("trace never empty");
            println!(
                "seed {seed}: loss {:.4} -> {:.4}, accuracy {:.3} -> {:.3} over {} epochs",
                first.mean_loss,
                last.mean_loss,
                first.train_accuracy,
                last.train_accuracy,
                last.epoch
            );
            let mi = output.mi.last().expect("mi trace never empty");
            println!(
                "final MI: I(Di:Mo) = {:.4}, I(Mi:Mo) = {:.4} bits",
                mi.i_di_mo.max(0.0),
                mi.i_mi_mo.max(0.0)
            );
            println!("outputs in {}", dir.display());
            Ok(())
        }
        Command::Experiment { common, runs, seed, workers } => {
            let mut config = RunConfig::from_path(&common.config)?;
            if let Some(runs) = runs {
                config.experiment.runs = runs;
            }
            if let Some(seed) = seed {
                config.experiment.base_seed = Some(seed);
            }
            if let Some(workers) = workers {
                config.experiment.workers = workers;
            }
            config.validate()?;
            let dir = out_dir(&common, &config);
            let agg = run_experiment(&config, &dir)?;
            println!(
                "{} runs x {} epochs aggregated into {}",
                agg.runs,
                agg.epochs.len() - 1,
                dir.join("aggregate.csv").display()
            );
            let report = summarize(&agg, 0.02)?;
            print_report(&report);
            Ok(())
        }
        Command::Analyze { theta } => {
            let snapshot = ThetaSnapshot::from_path(&theta)?;
            let circuit = build_brickwall::<f64>(&snapshot.ansatz);
            let partition =
                SubsystemPartition::new(snapshot.ansatz.n, snapshot.ansatz.measured_qubit)?;
            let record = mi_at_theta(&circuit, &snapshot.theta, &partition, snapshot.epoch)?;
            println!(
                "epoch {} (seed {}): I(Di:Mo) = {:.6} bits, I(Mi:Mo) = {:.6} bits",
                record.epoch,
                snapshot.seed,
                record.i_di_mo.max(0.0),
                record.i_mi_mo.max(0.0)
            );
            for (k, v) in record.per_qubit_di.iter().enumerate() {
                println!("I(Di{}:Mo) = {:.6} bits", k + 1, v.max(0.0));
            }
            println!(
                "sum of single-qubit terms = {:.6} bits",
                record.per_qubit_sum().max(0.0)
            );
            Ok(())
        }
        Command::Summarize { input, min_drop } => {
            let agg = parse_aggregate_csv(&input)?;
            let report = summarize(&agg, min_drop)?;
            print_report(&report);
            Ok(())
        }
    }
}

fn print_report(report: &TrendReport) {
    println!("trend report over {} epoch rows:", report.epochs);
    println!(
        "  I(Di:Mo): final - initial = {:+.4} bits (Spearman vs epoch = {:.3})",
        report.delta_i_di_mo, report.spearman_i_di_mo
    );
    println!(
        "  I(Mi:Mo): peak {:.4} at epoch {}, final {:.4} (drop {:.4}); two-phase: {}",
        report.i_mi_mo_peak,
        report.i_mi_mo_peak_epoch,
        report.i_mi_mo_final,
        report.i_mi_mo_drop_from_peak,
        if report.two_phase { "yes" } else { "no" }
    );
    println!(
        "  loss: final - initial = {:+.4}; smoothed (window {}) monotone non-increasing: {}",
        report.delta_loss,
        runner::LOSS_SMOOTHING_WINDOW,
        if report.loss_monotone_after_smoothing { "yes" } else { "no" }
    );
}
