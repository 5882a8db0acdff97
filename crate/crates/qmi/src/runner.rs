//! Experiment orchestration: config files, seeded multi-run experiments,
//! aggregation and CSV/manifest emission.
//!
//! Runs are embarrassingly parallel and fully deterministic per seed, so
//! worker count and scheduling order cannot change any output byte.
//! Everything here is concrete `f64`: it is plumbing around the generic
//! core, and the file formats are fixed-width decimal anyway.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuit::{build_brickwall, AnsatzSpec, Circuit};
use crate::datasets::{load_dataset, split, DatasetSpec, LoadReport, Sample};
use crate::encoding::Scaler;
use crate::error::{Error, Result};
use crate::infodyn::{mi_trace, MIRecord, SubsystemPartition};
use crate::training::{train, EncodedSample, GradientMethod, TrainConfig, TrainingTrace};

/// How the Choi-state ensemble is realized. Only the EPR-pair
/// construction (uniform over the computational basis) is implemented;
/// `data-ensemble` is reserved for a purification over sample indices and
/// is rejected at validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChoiEnsemble {
    Epr,
    DataEnsemble,
}

impl Default for ChoiEnsemble {
    fn default() -> Self {
        ChoiEnsemble::Epr
    }
}

/// `[training]` section of a run config.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct TrainingSection {
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default)]
    pub gradient: GradientMethod,
    #[serde(default = "default_dtheta")]
    pub dtheta: f64,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    /// Half-width of the uniform θ initialization, in radians.
    #[serde(default = "default_init_range")]
    pub init_range: f64,
    /// Seed for single `train` runs; also the default experiment base seed.
    #[serde(default)]
    pub seed: u64,
}

fn default_epochs() -> usize {
    100
}
fn default_learning_rate() -> f64 {
    0.01
}
fn default_dtheta() -> f64 {
    1e-3
}
fn default_train_fraction() -> f64 {
    0.8
}
fn default_init_range() -> f64 {
    std::f64::consts::FRAC_PI_8
}

impl Default for TrainingSection {
    fn default() -> Self {
        Self {
            epochs: default_epochs(),
            learning_rate: default_learning_rate(),
            gradient: GradientMethod::default(),
            dtheta: default_dtheta(),
            train_fraction: default_train_fraction(),
            init_range: default_init_range(),
            seed: 0,
        }
    }
}

/// `[experiment]` section of a run config.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Seeds are `base_seed .. base_seed + runs`. Defaults to the
    /// training seed.
    #[serde(default)]
    pub base_seed: Option<u64>,
    /// Worker threads; 0 means one per core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub choi_ensemble: ChoiEnsemble,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn default_runs() -> usize {
    50
}

/// Full experiment description, loadable from TOML or JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetSpec,
    pub ansatz: AnsatzSpec,
    #[serde(default)]
    pub training: TrainingSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

impl RunConfig {
    /// Parse a config file; the extension picks the format
    /// (`.toml` or `.json`).
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        let config: RunConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
            Some("json") => serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
            other => {
                return Err(Error::Config(format!(
                    "unsupported config extension {other:?} (want .toml or .json)"
                )))
            }
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.dataset.validate()?;
        self.ansatz.validate()?;
        if self.dataset.n != self.ansatz.n {
            return Err(Error::Config(format!(
                "dataset encodes into {} qubits but the ansatz has {}",
                self.dataset.n, self.ansatz.n
            )));
        }
        if self.training.epochs < 1 {
            return Err(Error::Config("training needs epochs >= 1".into()));
        }
        if !(self.training.train_fraction > 0.0 && self.training.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train fraction must lie in (0, 1), got {}",
                self.training.train_fraction
            )));
        }
        if self.training.dtheta <= 0.0 {
            return Err(Error::Config("dtheta must be positive".into()));
        }
        if self.training.init_range <= 0.0 {
            return Err(Error::Config("init-range must be positive".into()));
        }
        if self.experiment.runs < 1 {
            return Err(Error::Config("experiment needs runs >= 1".into()));
        }
        if self.experiment.choi_ensemble == ChoiEnsemble::DataEnsemble {
            return Err(Error::Config(
                "choi-ensemble = \"data-ensemble\" is reserved and not implemented; use \"epr\""
                    .into(),
            ));
        }
        Ok(())
    }

    pub fn base_seed(&self) -> u64 {
        self.experiment.base_seed.unwrap_or(self.training.seed)
    }

    fn train_config(&self, seed: u64) -> TrainConfig<f64> {
        TrainConfig {
            epochs: self.training.epochs,
            learning_rate: self.training.learning_rate,
            gradient: self.training.gradient,
            dtheta: self.training.dtheta,
            init_range: self.training.init_range,
            measured_qubit: self.ansatz.measured_qubit,
            seed,
        }
    }
}

/// Everything one seeded run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub seed: u64,
    pub trace: TrainingTrace<f64>,
    pub mi: Vec<MIRecord<f64>>,
}

/// Split, scale (train-split statistics only) and encode one run's data.
fn prepare_run(
    samples: &[Sample<f64>],
    config: &RunConfig,
    seed: u64,
) -> Result<Vec<EncodedSample<f64>>> {
    let (train_side, _eval) = split(samples, config.training.train_fraction, seed)?;
    let encoding = config.dataset.encoding();
    let n = config.dataset.n;
    let mut encoded = Vec::with_capacity(train_side.len());
    if encoding.wants_scaled() {
        let scaler = Scaler::fit(train_side.iter().map(|s| &s.features))?;
        for sample in &train_side {
            let scaled = scaler.scale(&sample.features)?;
            encoded.push(EncodedSample {
                state: encoding.encode(&scaled, n)?,
                label: sample.label,
            });
        }
    } else {
        for sample in &train_side {
            encoded.push(EncodedSample {
                state: encoding.encode(&sample.features, n)?,
                label: sample.label,
            });
        }
    }
    Ok(encoded)
}

/// Train one seed and compute its epoch-wise MI diagnostics.
pub fn run_single(
    samples: &[Sample<f64>],
    circuit: &Circuit<f64>,
    config: &RunConfig,
    seed: u64,
) -> Result<RunOutput> {
    let batch = prepare_run(samples, config, seed)?;
    let trace = train(&batch, circuit, &config.train_config(seed))?;
    let partition = SubsystemPartition::new(config.ansatz.n, config.ansatz.measured_qubit)?;
    let mi = mi_trace(&trace, circuit, &partition)?;
    Ok(RunOutput { seed, trace, mi })
}

/// Per-epoch mean and standard deviation of one reported column.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Across-run aggregate of every reported column.
#[derive(Clone, Debug)]
pub struct AggregateTrace {
    pub epochs: Vec<usize>,
    pub loss: ColumnStats,
    pub accuracy: ColumnStats,
    pub i_di_mo: ColumnStats,
    pub i_mi_mo: ColumnStats,
    /// One column per discarded input qubit, ascending qubit index.
    pub per_qubit_di: Vec<ColumnStats>,
    pub runs: usize,
}

/// Reported (clamped-at-zero) MI value.
fn reported(v: f64) -> f64 {
    v.max(0.0)
}

/// Column-wise mean/std (population) across runs. All runs must cover the
/// same epochs.
pub fn aggregate(outputs: &[RunOutput]) -> Result<AggregateTrace> {
    let first = outputs.first().ok_or_else(|| {
        Error::Config("cannot aggregate zero runs".into())
    })?;
    let epochs: Vec<usize> = first.trace.records.iter().map(|r| r.epoch).collect();
    let num_di = first
        .mi
        .first()
        .map_or(0, |m| m.per_qubit_di.len());
    for out in outputs {
        let same_epochs = out.trace.records.len() == epochs.len()
            && out.mi.len() == epochs.len()
            && out.mi.iter().all(|m| m.per_qubit_di.len() == num_di);
        if !same_epochs {
            return Err(Error::DimensionMismatch(
                "runs disagree on epoch count or register size".into(),
            ));
        }
    }

    let stats = |values: &dyn Fn(&RunOutput, usize) -> f64| -> ColumnStats {
        let mut mean = Vec::with_capacity(epochs.len());
        let mut std = Vec::with_capacity(epochs.len());
        let count = outputs.len() as f64;
        for e in 0..epochs.len() {
            let m = outputs.iter().map(|o| values(o, e)).sum::<f64>() / count;
            let var = outputs
                .iter()
                .map(|o| {
                    let d = values(o, e) - m;
                    d * d
                })
                .sum::<f64>()
                / count;
            mean.push(m);
            std.push(var.sqrt());
        }
        ColumnStats { mean, std }
    };

    let loss = stats(&|o, e| o.trace.records[e].mean_loss);
    let accuracy = stats(&|o, e| o.trace.records[e].train_accuracy);
    let i_di_mo = stats(&|o, e| reported(o.mi[e].i_di_mo));
    let i_mi_mo = stats(&|o, e| reported(o.mi[e].i_mi_mo));
    let per_qubit_di = (0..num_di)
        .map(|q| stats(&move |o: &RunOutput, e: usize| reported(o.mi[e].per_qubit_di[q])))
        .collect();

    Ok(AggregateTrace {
        epochs,
        loss,
        accuracy,
        i_di_mo,
        i_mi_mo,
        per_qubit_di,
        runs: outputs.len(),
    })
}

fn per_qubit_headers(count: usize) -> Vec<String> {
    (1..=count).map(|k| format!("I_Di{k}_Mo")).collect()
}

/// Render one run as CSV: epoch, loss, accuracy, I_Di_Mo, I_Mi_Mo and the
/// per-qubit columns. MI values are clamped at zero for the report.
pub fn run_csv(output: &RunOutput) -> String {
    let num_di = output.mi.first().map_or(0, |m| m.per_qubit_di.len());
    let mut text = String::from("epoch,loss,accuracy,I_Di_Mo,I_Mi_Mo");
    for h in per_qubit_headers(num_di) {
        let _ = write!(text, ",{h}");
    }
    text.push('\n');
    for (record, mi) in output.trace.records.iter().zip(&output.mi) {
        let _ = write!(
            text,
            "{},{},{},{},{}",
            record.epoch,
            record.mean_loss,
            record.train_accuracy,
            reported(mi.i_di_mo),
            reported(mi.i_mi_mo)
        );
        for &v in &mi.per_qubit_di {
            let _ = write!(text, ",{}", reported(v));
        }
        text.push('\n');
    }
    text
}

/// Render an aggregate as CSV with `<column>_mean`/`<column>_std` pairs.
pub fn aggregate_csv(agg: &AggregateTrace) -> String {
    let mut text = String::from("epoch");
    let mut columns: Vec<(&str, &ColumnStats)> = vec![
        ("loss", &agg.loss),
        ("accuracy", &agg.accuracy),
        ("I_Di_Mo", &agg.i_di_mo),
        ("I_Mi_Mo", &agg.i_mi_mo),
    ];
    let headers = per_qubit_headers(agg.per_qubit_di.len());
    for (h, stats) in headers.iter().zip(&agg.per_qubit_di) {
        columns.push((h, stats));
    }
    for (name, _) in &columns {
        let _ = write!(text, ",{name}_mean,{name}_std");
    }
    text.push('\n');
    for (e, &epoch) in agg.epochs.iter().enumerate() {
        let _ = write!(text, "{epoch}");
        for (_, stats) in &columns {
            let _ = write!(text, ",{},{}", stats.mean[e], stats.std[e]);
        }
        text.push('\n');
    }
    text
}

/// Parse an `aggregate.csv` back into an [`AggregateTrace`] (run count is
/// not recorded in the file and comes back as 0).
pub fn parse_aggregate_csv(path: impl AsRef<Path>) -> Result<AggregateTrace> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::MalformedRow {
        path: path.to_path_buf(),
        line: 1,
        message: "empty aggregate file".into(),
    })?;
    let names: Vec<&str> = header.split(',').collect();
    let expect_pairs = (names.len() - 1) / 2;
    if names.first() != Some(&"epoch") || names.len() != 1 + 2 * expect_pairs {
        return Err(Error::MalformedRow {
            path: path.to_path_buf(),
            line: 1,
            message: "unexpected aggregate header".into(),
        });
    }

    let mut epochs = Vec::new();
    let mut columns: Vec<ColumnStats> = (0..expect_pairs)
        .map(|_| ColumnStats { mean: Vec::new(), std: Vec::new() })
        .collect();
    for (i, line) in lines.enumerate() {
        let line_no = (i + 2) as u64;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != names.len() {
            return Err(Error::MalformedRow {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("expected {} fields, got {}", names.len(), fields.len()),
            });
        }
        let bad_row = |message: String| Error::MalformedRow {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        epochs.push(
            fields[0]
                .parse()
                .map_err(|_| bad_row(format!("bad epoch {:?}", fields[0])))?,
        );
        for (c, chunk) in fields[1..].chunks(2).enumerate() {
            columns[c].mean.push(
                chunk[0]
                    .parse()
                    .map_err(|_| bad_row(format!("bad value {:?}", chunk[0])))?,
            );
            columns[c].std.push(
                chunk[1]
                    .parse()
                    .map_err(|_| bad_row(format!("bad value {:?}", chunk[1])))?,
            );
        }
    }
    if columns.len() < 4 {
        return Err(Error::MalformedRow {
            path: path.to_path_buf(),
            line: 1,
            message: "aggregate needs loss, accuracy and the two MI columns".into(),
        });
    }
    let per_qubit_di = columns.split_off(4);
    let mut it = columns.into_iter();
    Ok(AggregateTrace {
        epochs,
        loss: it.next().unwrap(),
        accuracy: it.next().unwrap(),
        i_di_mo: it.next().unwrap(),
        i_mi_mo: it.next().unwrap(),
        per_qubit_di,
        runs: 0,
    })
}

/// Execution record written next to the CSVs. Timestamps and wall time
/// live only here, keeping the CSV outputs byte-reproducible.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub config: RunConfig,
    pub seeds: Vec<u64>,
    pub dataset_sha256: String,
    pub dataset_report: LoadReport,
    pub circuit_gates: Circuit<f64>,
    pub wall_time_seconds: f64,
    pub completed_unix_time: u64,
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Run `runs` seeded trainings, write `run_<seed>.csv` per run plus
/// `aggregate.csv` and `manifest.json` under `out_dir`, and return the
/// aggregate.
///
/// On any run failure the completed outputs are kept, a `.partial` marker
/// names the failing seed, and the error is surfaced.
pub fn run_experiment(config: &RunConfig, out_dir: impl AsRef<Path>) -> Result<AggregateTrace> {
    config.validate()?;
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;

    let started = Instant::now();
    let (samples, dataset_report) = load_dataset::<f64>(&config.dataset)?;
    let circuit = build_brickwall::<f64>(&config.ansatz);
    let seeds: Vec<u64> = (0..config.experiment.runs as u64)
        .map(|k| config.base_seed() + k)
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.experiment.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    let results: Vec<Result<RunOutput>> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                run_single(&samples, &circuit, config, seed).map_err(|e| Error::RunFailed {
                    seed,
                    source: Box::new(e),
                })
            })
            .collect()
    });

    let mut outputs = Vec::with_capacity(results.len());
    let mut failure: Option<Error> = None;
    for result in results {
        match result {
            Ok(output) => outputs.push(output),
            Err(e) if failure.is_none() => failure = Some(e),
            Err(_) => {}
        }
    }
    for output in &outputs {
        let path = out_dir.join(format!("run_{}.csv", output.seed));
        write_file(&path, &run_csv(output))?;
    }
    if let Some(error) = failure {
        let marker = out_dir.join(".partial");
        let _ = std::fs::write(&marker, format!("{error}\n"));
        return Err(error);
    }

    let agg = aggregate(&outputs)?;
    write_file(&out_dir.join("aggregate.csv"), &aggregate_csv(&agg))?;

    let manifest = Manifest {
        config: config.clone(),
        seeds,
        dataset_sha256: sha256_file(&config.dataset.path)?,
        dataset_report,
        circuit_gates: circuit,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        completed_unix_time: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest serialization failed: {e}")))?;
    write_file(&out_dir.join("manifest.json"), &manifest_json)?;

    Ok(agg)
}

/// A trained parameter vector with enough context to rebuild its circuit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaSnapshot {
    pub ansatz: AnsatzSpec,
    pub seed: u64,
    pub epoch: usize,
    pub theta: Vec<f64>,
}

impl ThetaSnapshot {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Single seeded training run: writes `run_<seed>.csv` and
/// `theta_<seed>.json` (the final parameters) under `out_dir`.
pub fn run_training(
    config: &RunConfig,
    seed: u64,
    out_dir: impl AsRef<Path>,
) -> Result<RunOutput> {
    config.validate()?;
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let (samples, _report) = load_dataset::<f64>(&config.dataset)?;
    let circuit = build_brickwall::<f64>(&config.ansatz);
    let output = run_single(&samples, &circuit, config, seed)?;

    write_file(&out_dir.join(format!("run_{seed}.csv")), &run_csv(&output))?;
    let last = output.trace.records.last().expect("trace never empty");
    let snapshot = ThetaSnapshot {
        ansatz: config.ansatz,
        seed,
        epoch: last.epoch,
        theta: last.theta.clone(),
    };
    let json = serde_json::to_string_pretty(&snapshot)
        .map_err(|e| Error::Config(format!("snapshot serialization failed: {e}")))?;
    write_file(&out_dir.join(format!("theta_{seed}.json")), &json)?;
    Ok(output)
}

/// Moving average with a centered window, truncated at the edges.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 || values.is_empty() {
        return values.to_vec();
    }
    let half = window / 2;
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(values.len() - 1);
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Spearman rank correlation of a series against its index order.
/// Ties receive average ranks.
pub fn spearman_vs_index(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let ranks = average_ranks(values);
    let index_ranks: Vec<f64> = (0..n).map(|i| i as f64).collect();
    pearson(&ranks, &index_ranks)
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("NaN in series"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}

/// Trend summary of an aggregate: where the curves start, peak and end.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrendReport {
    pub epochs: usize,
    /// mean I(Di:Mo): final − initial.
    pub delta_i_di_mo: f64,
    /// Spearman rank correlation of mean I(Di:Mo) with the epoch index.
    pub spearman_i_di_mo: f64,
    /// argmax of mean I(Mi:Mo) (earliest epoch on ties).
    pub i_mi_mo_peak_epoch: usize,
    pub i_mi_mo_peak: f64,
    pub i_mi_mo_final: f64,
    /// peak − final of mean I(Mi:Mo).
    pub i_mi_mo_drop_from_peak: f64,
    /// mean loss: final − initial.
    pub delta_loss: f64,
    /// Peak strictly interior and drop above the threshold.
    pub two_phase: bool,
    /// Window-5 smoothed mean loss is non-increasing.
    pub loss_monotone_after_smoothing: bool,
}

/// Smoothing window for the loss monotonicity check.
pub const LOSS_SMOOTHING_WINDOW: usize = 5;

/// Summarize an aggregate's trends; `two_phase_min_drop` is the bits of
/// I(Mi:Mo) that must be shed after the peak to call it two-phase.
pub fn summarize(agg: &AggregateTrace, two_phase_min_drop: f64) -> Result<TrendReport> {
    let n = agg.epochs.len();
    if n < 3 {
        return Err(Error::DimensionMismatch(format!(
            "trend summary needs at least 3 epochs, got {n}"
        )));
    }
    let i_di = &agg.i_di_mo.mean;
    let i_mi = &agg.i_mi_mo.mean;
    let loss = &agg.loss.mean;

    let (peak_idx, &peak) = i_mi
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            a.partial_cmp(b)
                .expect("NaN in MI curve")
                .then(ib.cmp(ia)) // earliest epoch wins ties
        })
        .expect("nonempty");
    let final_value = *i_mi.last().unwrap();
    let drop = peak - final_value;
    let interior = peak_idx > 0 && peak_idx < n - 1;

    let smoothed = moving_average(loss, LOSS_SMOOTHING_WINDOW);
    let monotone = smoothed.windows(2).all(|w| w[1] <= w[0] + 1e-12);

    Ok(TrendReport {
        epochs: n,
        delta_i_di_mo: i_di.last().unwrap() - i_di.first().unwrap(),
        spearman_i_di_mo: spearman_vs_index(i_di),
        i_mi_mo_peak_epoch: agg.epochs[peak_idx],
        i_mi_mo_peak: peak,
        i_mi_mo_final: final_value,
        i_mi_mo_drop_from_peak: drop,
        delta_loss: loss.last().unwrap() - loss.first().unwrap(),
        two_phase: interior && drop > two_phase_min_drop,
        loss_monotone_after_smoothing: monotone,
    })
}
