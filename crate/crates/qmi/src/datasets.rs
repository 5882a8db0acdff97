//! Dataset ingestion: CSV loading, label encoding, deterministic splits.
//!
//! Three binary-classification profiles are built in:
//!
//! * `iris2` — UCI Iris restricted to setosa/versicolor, 4 features,
//!   headerless `sepal…,petal…,Iris-<name>` rows;
//! * `diabetes` — Pima-schema CSV with header, 8 features + `Outcome`;
//! * `bcw` — Breast Cancer Wisconsin (Original) format, headerless
//!   `id,9 features,class` rows, `?` marking missing values (dropped),
//!   class 2 = benign, 4 = malignant.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{EncodingMethod, FeatureVector};
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Binary class label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Class0,
    Class1,
}

impl Label {
    pub fn index(&self) -> usize {
        match self {
            Label::Class0 => 0,
            Label::Class1 => 1,
        }
    }

    pub fn one_hot<T: Real>(&self) -> [T; 2] {
        match self {
            Label::Class0 => [T::one(), T::zero()],
            Label::Class1 => [T::zero(), T::one()],
        }
    }
}

/// One labeled example.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    pub features: FeatureVector<T>,
    pub label: Label,
}

/// Which built-in parsing profile a file follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Iris2,
    Diabetes,
    Bcw,
}

impl DatasetKind {
    pub fn name(&self) -> &'static str {
        match self {
            DatasetKind::Iris2 => "iris2",
            DatasetKind::Diabetes => "diabetes",
            DatasetKind::Bcw => "bcw",
        }
    }

    /// Feature dimension the profile guarantees after loading.
    pub fn feature_dim(&self) -> usize {
        match self {
            DatasetKind::Iris2 => 4,
            DatasetKind::Diabetes => 8,
            DatasetKind::Bcw => 9,
        }
    }

    /// Encoding each dataset is wired to.
    pub fn encoding(&self) -> EncodingMethod {
        match self {
            DatasetKind::Iris2 => EncodingMethod::Qubit,
            DatasetKind::Diabetes => EncodingMethod::Interleaved,
            DatasetKind::Bcw => EncodingMethod::Amplitude,
        }
    }

    fn has_header(&self) -> bool {
        matches!(self, DatasetKind::Diabetes)
    }
}

/// A dataset source: profile, file path, encoding and qubit budget.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    pub path: PathBuf,
    #[serde(default)]
    pub encoding: Option<EncodingMethod>,
    pub n: usize,
}

impl DatasetSpec {
    pub fn new(kind: DatasetKind, path: impl Into<PathBuf>, n: usize) -> Self {
        Self { kind, path: path.into(), encoding: None, n }
    }

    /// Effective encoding: the profile's canonical one unless the config
    /// spelled it out (which must agree, per [`DatasetSpec::validate`]).
    pub fn encoding(&self) -> EncodingMethod {
        self.encoding.unwrap_or_else(|| self.kind.encoding())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(enc) = self.encoding {
            if enc != self.kind.encoding() {
                return Err(Error::Config(format!(
                    "dataset {} is wired to {} encoding, got {}",
                    self.kind.name(),
                    self.kind.encoding().name(),
                    enc.name()
                )));
            }
        }
        let d = self.kind.feature_dim();
        match self.encoding() {
            EncodingMethod::Qubit if d != self.n => Err(Error::Config(format!(
                "qubit encoding needs n = d = {d}, got n = {}",
                self.n
            ))),
            EncodingMethod::Interleaved if self.n >= d => Err(Error::Config(format!(
                "interleaved encoding needs n < d = {d}, got n = {}",
                self.n
            ))),
            EncodingMethod::Amplitude if d > (1 << self.n) => Err(Error::Config(format!(
                "amplitude encoding of d = {d} features needs 2^n ≥ {d}, got n = {}",
                self.n
            ))),
            _ => Ok(()),
        }
    }
}

/// What the loader saw: row counts, drops, class balance.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct LoadReport {
    pub rows_read: usize,
    pub samples: usize,
    pub dropped_missing: usize,
    pub skipped_other_class: usize,
    pub class_counts: [usize; 2],
}

/// Load and label a dataset per its profile. Malformed rows and unknown
/// class labels are hard errors carrying the 1-based line number.
pub fn load_dataset<T: Real>(spec: &DatasetSpec) -> Result<(Vec<Sample<T>>, LoadReport)> {
    spec.validate()?;
    let path = spec.path.as_path();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(spec.kind.has_header())
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| io_error(path, e))?;

    let mut samples = Vec::new();
    let mut report = LoadReport::default();
    for record in reader.records() {
        let record = record.map_err(|e| io_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        report.rows_read += 1;
        match parse_row::<T>(spec.kind, &record, path, line)? {
            Parsed::Sample(sample) => {
                report.class_counts[sample.label.index()] += 1;
                samples.push(sample);
            }
            Parsed::Missing => report.dropped_missing += 1,
            Parsed::OtherClass => report.skipped_other_class += 1,
        }
    }
    report.samples = samples.len();
    Ok((samples, report))
}

enum Parsed<T> {
    Sample(Sample<T>),
    Missing,
    OtherClass,
}

fn parse_row<T: Real>(
    kind: DatasetKind,
    record: &csv::StringRecord,
    path: &Path,
    line: u64,
) -> Result<Parsed<T>> {
    let expect_fields = match kind {
        DatasetKind::Iris2 => 5,
        DatasetKind::Diabetes => 9,
        DatasetKind::Bcw => 11,
    };
    if record.len() != expect_fields {
        return Err(Error::MalformedRow {
            path: path.to_path_buf(),
            line,
            message: format!("expected {expect_fields} fields, got {}", record.len()),
        });
    }

    match kind {
        DatasetKind::Iris2 => {
            let label = match &record[4] {
                "Iris-setosa" => Label::Class0,
                "Iris-versicolor" => Label::Class1,
                "Iris-virginica" => return Ok(Parsed::OtherClass),
                other => {
                    return Err(Error::UnknownLabel {
                        path: path.to_path_buf(),
                        line,
                        label: other.to_string(),
                    })
                }
            };
            let features = parse_features::<T>(record, 0..4, path, line)?;
            Ok(Parsed::Sample(Sample { features, label }))
        }
        DatasetKind::Diabetes => {
            let label = match &record[8] {
                "0" => Label::Class0,
                "1" => Label::Class1,
                other => {
                    return Err(Error::UnknownLabel {
                        path: path.to_path_buf(),
                        line,
                        label: other.to_string(),
                    })
                }
            };
            let features = parse_features::<T>(record, 0..8, path, line)?;
            Ok(Parsed::Sample(Sample { features, label }))
        }
        DatasetKind::Bcw => {
            // field 0 is the sample id; features are 1..=9
            if (1..10).any(|i| &record[i] == "?") {
                return Ok(Parsed::Missing);
            }
            let label = match &record[10] {
                "2" => Label::Class0,
                "4" => Label::Class1,
                other => {
                    return Err(Error::UnknownLabel {
                        path: path.to_path_buf(),
                        line,
                        label: other.to_string(),
                    })
                }
            };
            let features = parse_features::<T>(record, 1..10, path, line)?;
            Ok(Parsed::Sample(Sample { features, label }))
        }
    }
}

fn parse_features<T: Real>(
    record: &csv::StringRecord,
    fields: std::ops::Range<usize>,
    path: &Path,
    line: u64,
) -> Result<FeatureVector<T>> {
    let mut values = Vec::with_capacity(fields.len());
    for i in fields {
        let v: f64 = record[i].parse().map_err(|_| Error::MalformedRow {
            path: path.to_path_buf(),
            line,
            message: format!("field {i} ({:?}) is not a number", &record[i]),
        })?;
        values.push(real::<T>(v));
    }
    Ok(FeatureVector::raw(values))
}

fn io_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io { path: path.to_path_buf(), source },
        other => Error::MalformedRow {
            path: path.to_path_buf(),
            line: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Deterministic stratified split. Per-class train counts follow the
/// largest-remainder rule against the global target
/// `round(fraction · N)`, keeping class proportions within ±1 sample.
pub fn split<T: Real>(
    samples: &[Sample<T>],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<Sample<T>>, Vec<Sample<T>>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, s) in samples.iter().enumerate() {
        by_class[s.label.index()].push(i);
    }

    let target = (train_fraction * samples.len() as f64).round() as usize;
    let mut take: Vec<usize> = by_class
        .iter()
        .map(|idx| (train_fraction * idx.len() as f64).floor() as usize)
        .collect();
    let mut leftover = target.saturating_sub(take.iter().sum());
    // hand leftovers to the classes with the largest fractional remainder
    let mut order: Vec<usize> = (0..2).collect();
    order.sort_by(|&a, &b| {
        let ra = train_fraction * by_class[a].len() as f64 - take[a] as f64;
        let rb = train_fraction * by_class[b].len() as f64 - take[b] as f64;
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &c in &order {
        if leftover == 0 {
            break;
        }
        if take[c] < by_class[c].len() {
            take[c] += 1;
            leftover -= 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut eval = Vec::new();
    for (c, indices) in by_class.iter().enumerate() {
        let mut shuffled = indices.clone();
        shuffled.shuffle(&mut rng);
        for (k, &i) in shuffled.iter().enumerate() {
            if k < take[c] {
                train.push(samples[i].clone());
            } else {
                eval.push(samples[i].clone());
            }
        }
    }
    if train.is_empty() {
        return Err(Error::EmptySplit("train"));
    }
    if eval.is_empty() {
        return Err(Error::EmptySplit("eval"));
    }
    Ok((train, eval))
}
