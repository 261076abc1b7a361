//! Cough-audio classification pipeline.
//!
//! Classifies fixed-duration cough segments as positive or negative for a
//! respiratory condition by a three-stage pipeline:
//!
//! 1. [`wavelet`] — 5-level discrete wavelet decomposition of each segment
//!    into detail bands D1..D5 and approximation A5.
//! 2. [`features`] — nine statistics per band, a 54-dimensional vector.
//! 3. [`normalize`] + [`svm`] — per-column z-score or min-max scaling fitted
//!    on training rows only, then a kernel SVM trained by SMO.
//!
//! [`eval`] runs the cross-validated comparison between the two
//! normalization schemes and reports accuracy, recall, specificity,
//! precision and F1 from a pooled confusion matrix. [`dataset_io`] reads a
//! CSV manifest of labeled WAV recordings, and [`synth`] can fabricate a
//! separable two-class dataset for shakedowns.
//!
//! Everything is deterministic given the single seed in
//! [`config::ExperimentConfig`]; two runs with the same config produce
//! byte-identical reports apart from the timestamp.
//!
//! The `examples/` directory has one runnable program per capability —
//! start with `cross_validate`:
//!
//! ```bash
//! cargo run --example cross_validate
//! ```
//!
//! The same pipeline is scriptable through the thin `coughwave` binary; see
//! [`pipeline`] for the command set.

pub mod config;
pub mod dataset_io;
pub mod error;
pub mod eval;
pub mod features;
pub mod normalize;
pub mod pipeline;
pub mod rng;
pub mod svm;
pub mod synth;
pub mod wavelet;

pub use config::ExperimentConfig;
pub use dataset_io::{AudioSegment, DatasetManifest, Label};
pub use error::{Error, Result};
pub use eval::{run_experiment, ConfusionMatrix, ExperimentReport, MetricsReport};
pub use features::{FeatureMatrix, FeatureVector};
pub use normalize::{apply_normalizer, fit_normalizer, NormMethod, NormalizationParams};
pub use svm::{kernel_eval, train_smo, KernelSpec, SvmModel, TrainConfig};
pub use wavelet::{
    dwt_decompose, dwt_single_level, idwt_reconstruct, Boundary, WaveletDecomposition,
    WaveletSpec,
};
