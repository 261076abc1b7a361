//! Crate-wide error type.
//!
//! Every variant belongs to one pipeline stage; [`Error::stage`] reports which,
//! so the CLI can tag failures with the subsystem that produced them.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // ---- dataset_io ----
    #[error("manifest not found: {0}")]
    ManifestNotFound(PathBuf),
    #[error("manifest header must be `path,label,subject_id`, got `{0}`")]
    ManifestHeader(String),
    #[error("line {line}: unknown label `{token}` (expected positive or negative)")]
    UnknownLabel { line: usize, token: String },
    #[error("line {line}: expected 3 comma-separated fields, got {got}")]
    ManifestFieldCount { line: usize, got: usize },
    #[error("line {line}: duplicate path `{path}`")]
    DuplicateManifestPath { line: usize, path: String },
    #[error("line {line}: empty path field")]
    EmptyManifestPath { line: usize },
    #[error("manifest has no data rows")]
    EmptyManifest,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: not a RIFF/WAVE file")]
    NotWave { path: PathBuf },
    #[error("{path}: truncated {chunk} chunk")]
    Truncated { path: PathBuf, chunk: String },
    #[error("{path}: missing {chunk} chunk")]
    MissingChunk { path: PathBuf, chunk: String },
    #[error("{path}: format code {code} is not PCM (code 1)")]
    NonPcm { path: PathBuf, code: u16 },
    #[error("{path}: {channels} channels; only mono input is accepted, no silent downmix")]
    NotMono { path: PathBuf, channels: u16 },
    #[error("{path}: {bits} bits per sample; only 16-bit PCM is accepted")]
    UnsupportedBitDepth { path: PathBuf, bits: u16 },
    #[error("{path}: data chunk holds zero samples")]
    NoSamples { path: PathBuf },
    #[error("{path}: invalid sample rate {rate}")]
    BadSampleRate { path: PathBuf, rate: u32 },
    #[error("non-uniform sample rate: {first} Hz vs {other} Hz in {path}")]
    MixedSampleRates {
        first: u32,
        other: u32,
        path: PathBuf,
    },
    #[error("segmentation: {0}")]
    BadSegmentation(String),

    // ---- wavelet ----
    #[error("unknown wavelet `{0}` (expected haar or db2..db10)")]
    UnknownWavelet(String),
    #[error("wavelet `{name}` failed validation: {detail}")]
    InvalidWavelet { name: String, detail: String },
    #[error("signal of {0} samples is too short to transform (need at least 2)")]
    SignalTooShort(usize),
    #[error("{len} samples cannot support {levels} levels: level {level} input has {input_len} samples ({reason})")]
    TooManyLevels {
        len: usize,
        levels: usize,
        level: usize,
        input_len: usize,
        reason: String,
    },
    #[error("decomposition bands are inconsistent: {0}")]
    InconsistentBands(String),

    // ---- features ----
    #[error("cannot compute statistics of an empty coefficient band")]
    EmptyBand,
    #[error("feature row has {got} values, matrix expects {expected}")]
    RowWidthMismatch { expected: usize, got: usize },

    // ---- normalize ----
    #[error("cannot fit a normalizer on an empty feature matrix")]
    EmptyMatrix,
    #[error("normalizer fitted on {fitted} columns applied to a {got}-column matrix")]
    ColumnCountMismatch { fitted: usize, got: usize },

    // ---- svm ----
    #[error("vectors have mismatched dimensions: {a} vs {b}")]
    DimensionMismatch { a: usize, b: usize },
    #[error("single-class training set; need at least one example of each class")]
    SingleClass,
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },
    #[error("labels must be -1 or +1, got {0}")]
    BadLabel(f64),
    #[error("invalid training configuration: {0}")]
    BadTrainConfig(String),
    #[error("rbf gamma must be positive, got {0}")]
    BadGamma(f64),
    #[error("model file {path}: {detail}")]
    BadModelFile { path: PathBuf, detail: String },

    // ---- eval ----
    #[error("label and prediction lists differ in length: {truth} vs {predicted}")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("cannot build a confusion matrix from empty inputs")]
    EmptyLabels,
    #[error("confusion matrix is empty")]
    EmptyConfusion,
    #[error("folds must satisfy 2 <= k <= {groups} ({unit}), got k={k}")]
    BadFoldCount {
        k: usize,
        groups: usize,
        unit: String,
    },
    #[error("training requires both classes: {positive} positive, {negative} negative segments")]
    MissingClass { positive: usize, negative: usize },
    #[error("fold {fold}: {source}")]
    InFold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    // ---- pipeline_cli ----
    #[error("unknown flag `{0}`")]
    UnknownFlag(String),
    #[error("flag `{flag}` expects a value")]
    MissingFlagValue { flag: String },
    #[error("flag `{flag}`: {detail}")]
    BadFlagValue { flag: String, detail: String },
    #[error("unknown command `{0}` (expected extract, train, evaluate, cross-validate or dump-coeffs)")]
    UnknownCommand(String),
    #[error("no command given")]
    MissingCommand,
    #[error("{0}")]
    InvalidConfig(String),
    #[error("config file {path}: {detail}")]
    BadConfigFile { path: PathBuf, detail: String },
    #[error("failed to write {path}: {source}")]
    WriteArtifact {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Pipeline stage the error originates from.
    pub fn stage(&self) -> &'static str {
        use Error::*;
        match self {
            ManifestNotFound(_) | ManifestHeader(_) | UnknownLabel { .. }
            | ManifestFieldCount { .. } | DuplicateManifestPath { .. }
            | EmptyManifestPath { .. } | EmptyManifest | Io { .. } | NotWave { .. }
            | Truncated { .. } | MissingChunk { .. } | NonPcm { .. } | NotMono { .. }
            | UnsupportedBitDepth { .. } | NoSamples { .. } | BadSampleRate { .. }
            | MixedSampleRates { .. } | BadSegmentation(_) => "dataset_io",

            UnknownWavelet(_) | InvalidWavelet { .. } | SignalTooShort(_)
            | TooManyLevels { .. } | InconsistentBands(_) => "wavelet",

            EmptyBand | RowWidthMismatch { .. } => "features",

            EmptyMatrix | ColumnCountMismatch { .. } => "normalize",

            DimensionMismatch { .. } | SingleClass | NonFiniteFeature { .. }
            | BadLabel(_) | BadTrainConfig(_) | BadGamma(_) | BadModelFile { .. } => "svm",

            LengthMismatch { .. } | EmptyLabels | EmptyConfusion | BadFoldCount { .. }
            | MissingClass { .. } => "eval",

            InFold { source, .. } => source.stage(),

            UnknownFlag(_) | MissingFlagValue { .. } | BadFlagValue { .. }
            | UnknownCommand(_) | MissingCommand | InvalidConfig(_)
            | BadConfigFile { .. } | WriteArtifact { .. } => "pipeline_cli",
        }
    }

    pub(crate) fn in_fold(fold: usize, source: Error) -> Error {
        Error::InFold {
            fold,
            source: Box::new(source),
        }
    }
}
