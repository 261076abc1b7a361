//! Experiment configuration: defaults, file overrides, and validation.
//!
//! Precedence is fixed: command-line flags override config-file values, which
//! override the built-in defaults. The fully resolved config is echoed into
//! every output artifact, and all randomness flows from its single seed.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::SplitMode;
use crate::normalize::NormMethod;
use crate::wavelet::{Boundary, WaveletSpec};

/// Kernel selection before gamma resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Rbf,
}

impl KernelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Rbf => "rbf",
        }
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(KernelKind::Linear),
            "rbf" => Ok(KernelKind::Rbf),
            other => Err(Error::BadFlagValue {
                flag: "kernel".into(),
                detail: format!("expected linear or rbf, got `{other}`"),
            }),
        }
    }
}

/// Fully resolved experiment configuration.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub manifest: PathBuf,
    pub wavelet: String,
    pub levels: usize,
    pub boundary: Boundary,
    pub duration_ms: u32,
    pub prenorm_signal: bool,
    pub norm: NormMethod,
    pub paper_mode: bool,
    pub kernel: KernelKind,
    /// `None` selects the data-driven heuristic `1 / (d * mean variance)`.
    pub gamma: Option<f64>,
    pub c: f64,
    pub folds: usize,
    pub split: SplitMode,
    pub seed: u64,
    pub out: PathBuf,
    /// Model file consumed by `evaluate`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            manifest: PathBuf::new(),
            wavelet: "db4".into(),
            levels: 5,
            boundary: Boundary::Symmetric,
            duration_ms: 1640,
            prenorm_signal: false,
            norm: NormMethod::ZScore,
            paper_mode: false,
            kernel: KernelKind::Rbf,
            gamma: None,
            c: 1.0,
            folds: 10,
            split: SplitMode::SegmentStratified,
            seed: 42,
            out: PathBuf::from("."),
            model: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.manifest.as_os_str().is_empty() {
            return Err(Error::InvalidConfig(
                "a manifest is required (--manifest <path>)".into(),
            ));
        }
        if self.levels < 1 {
            return Err(Error::InvalidConfig("levels must be >= 1".into()));
        }
        if self.duration_ms == 0 {
            return Err(Error::InvalidConfig("duration-ms must be > 0".into()));
        }
        WaveletSpec::by_name(&self.wavelet)?;
        if let Some(gamma) = self.gamma {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "gamma must be positive, got {gamma}"
                )));
            }
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "C must be positive, got {}",
                self.c
            )));
        }
        if self.folds < 2 {
            return Err(Error::InvalidConfig("folds must be >= 2".into()));
        }
        Ok(())
    }

    /// Directory that relative manifest entry paths resolve against.
    pub fn manifest_dir(&self) -> PathBuf {
        self.manifest
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

/// Partial config as read from a JSON config file; any subset of keys.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigPatch {
    pub manifest: Option<PathBuf>,
    pub wavelet: Option<String>,
    pub levels: Option<usize>,
    pub boundary: Option<String>,
    pub duration_ms: Option<u32>,
    pub prenorm_signal: Option<bool>,
    pub norm: Option<String>,
    pub paper_mode: Option<bool>,
    pub kernel: Option<String>,
    pub gamma: Option<f64>,
    pub c: Option<f64>,
    pub folds: Option<usize>,
    pub split: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub model: Option<PathBuf>,
}

impl ConfigPatch {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|err| Error::BadConfigFile {
            path: path.to_path_buf(),
            detail: err.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|err| Error::BadConfigFile {
            path: path.to_path_buf(),
            detail: err.to_string(),
        })
    }

    pub fn apply_to(&self, config: &mut ExperimentConfig) -> Result<()> {
        if let Some(v) = &self.manifest {
            config.manifest = v.clone();
        }
        if let Some(v) = &self.wavelet {
            config.wavelet = v.clone();
        }
        if let Some(v) = self.levels {
            config.levels = v;
        }
        if let Some(v) = &self.boundary {
            config.boundary = v.parse()?;
        }
        if let Some(v) = self.duration_ms {
            config.duration_ms = v;
        }
        if let Some(v) = self.prenorm_signal {
            config.prenorm_signal = v;
        }
        if let Some(v) = &self.norm {
            config.norm = v.parse()?;
        }
        if let Some(v) = self.paper_mode {
            config.paper_mode = v;
        }
        if let Some(v) = &self.kernel {
            config.kernel = v.parse()?;
        }
        if let Some(v) = self.gamma {
            config.gamma = Some(v);
        }
        if let Some(v) = self.c {
            config.c = v;
        }
        if let Some(v) = self.folds {
            config.folds = v;
        }
        if let Some(v) = &self.split {
            config.split = v.parse()?;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = &self.out {
            config.out = v.clone();
        }
        if let Some(v) = &self.model {
            config.model = Some(v.clone());
        }
        Ok(())
    }
}
