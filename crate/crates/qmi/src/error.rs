//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("two-qubit gate targets must be distinct (both are {0})")]
    DuplicateTargets(usize),

    #[error("expected {expected} parameters, got {got}")]
    ParamCountMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("keep set must be nonempty")]
    EmptyKeepSet,

    #[error("subsystems overlap at qubit {0}")]
    OverlappingSubsystems(usize),

    #[error("state vector is not normalized (|norm^2 - 1| = {0:e})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max |A - A†| entry = {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max |U†U - I| entry = {0:e})")]
    NotUnitary(f64),

    #[error("not a valid density matrix: {0}")]
    NotDensity(String),

    #[error("eigensolver did not converge within {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("features must be scaled to [0, pi] before rotation encoding")]
    UnscaledFeatures,

    #[error("cannot amplitude-encode an all-zero feature vector")]
    ZeroVector,

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed row at line {line} of {path}: {message}")]
    MalformedRow {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("unknown class label {label:?} at line {line} of {path}")]
    UnknownLabel {
        path: PathBuf,
        line: u64,
        label: String,
    },

    #[error("split leaves the {0} side empty")]
    EmptySplit(&'static str),

    #[error("config error: {0}")]
    Config(String),

    #[error("run with seed {seed} failed: {source}")]
    RunFailed {
        seed: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 data, 4 numerical.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. }
            | Error::MalformedRow { .. }
            | Error::UnknownLabel { .. }
            | Error::EmptySplit(_) => 3,
            Error::RunFailed { source, .. } => source.exit_code(),
            _ => 4,
        }
    }
}
