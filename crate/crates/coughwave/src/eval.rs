//! Evaluation: confusion counts, the five performance metrics, fold
//! construction, and the cross-validated experiment driver.
//!
//! Metrics are kept as exact integer fractions next to their float values,
//! and a zero-denominator metric is an explicit `undefined` marker rather
//! than a silent zero. Human-readable percentages round half-up to one
//! decimal. The headline numbers come from the pooled confusion matrix
//! (fold counts summed before computing metrics); per-fold values are
//! reported alongside.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::config::{ExperimentConfig, KernelKind};
use crate::dataset_io::{self, DatasetManifest, Label, SegmentSource};
use crate::error::{Error, Result};
use crate::features::{self, FeatureMatrix, StatDefinition};
use crate::normalize::{apply_normalizer, fit_normalizer, NormalizationParams, NormMethod};
use crate::rng::{fold_seed, DetRng};
use crate::svm::{rbf_gamma_heuristic, train_smo, KernelSpec, TrainConfig};
use crate::wavelet::{dwt_decompose, WaveletSpec};

/// TP/FP/TN/FN counts with COVID19(+) as the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    #[serde(rename = "TP")]
    pub true_positives: u64,
    #[serde(rename = "FP")]
    pub false_positives: u64,
    #[serde(rename = "TN")]
    pub true_negatives: u64,
    #[serde(rename = "FN")]
    pub false_negatives: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fn_: u64, tn: u64, fp: u64) -> Self {
        ConfusionMatrix {
            true_positives: tp,
            false_negatives: fn_,
            true_negatives: tn,
            false_positives: fp,
        }
    }

    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }

    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Positive, Label::Positive) => self.true_positives += 1,
            (Label::Positive, Label::Negative) => self.false_negatives += 1,
            (Label::Negative, Label::Negative) => self.true_negatives += 1,
            (Label::Negative, Label::Positive) => self.false_positives += 1,
        }
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        self.true_positives += other.true_positives;
        self.false_positives += other.false_positives;
        self.true_negatives += other.true_negatives;
        self.false_negatives += other.false_negatives;
    }
}

/// Count prediction outcomes against ground truth.
pub fn confusion(truth: &[Label], predicted: &[Label]) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            truth: truth.len(),
            predicted: predicted.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyLabels);
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in truth.iter().zip(predicted) {
        cm.record(t, p);
    }
    Ok(cm)
}

/// Round a fraction to a percentage with one decimal, half-up.
pub fn percent_round_half_up(fraction: f64) -> String {
    let tenths = (fraction * 1000.0 + 0.5).floor() / 10.0;
    format!("{tenths:.1}")
}

/// One metric: an exact integer fraction, or an explicit undefined marker
/// when its denominator is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricValue {
    Defined { numerator: u64, denominator: u64 },
    Undefined,
}

impl MetricValue {
    fn ratio(numerator: u64, denominator: u64) -> Self {
        if denominator == 0 {
            MetricValue::Undefined
        } else {
            MetricValue::Defined {
                numerator,
                denominator,
            }
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, MetricValue::Defined { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            MetricValue::Defined {
                numerator,
                denominator,
            } => Some(*numerator as f64 / *denominator as f64),
            MetricValue::Undefined => None,
        }
    }

    /// Percentage string rounded half-up to one decimal, e.g. `99.2`.
    pub fn percent(&self) -> Option<String> {
        self.value().map(percent_round_half_up)
    }
}

impl Serialize for MetricValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MetricValue::Undefined => serializer.serialize_str("undefined"),
            MetricValue::Defined {
                numerator,
                denominator,
            } => {
                let mut s = serializer.serialize_struct("MetricValue", 4)?;
                s.serialize_field("numerator", numerator)?;
                s.serialize_field("denominator", denominator)?;
                s.serialize_field("value", &(*numerator as f64 / *denominator as f64))?;
                s.serialize_field("percent", &self.percent().expect("defined"))?;
                s.end()
            }
        }
    }
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.percent() {
            Some(p) => f.write_str(&p),
            None => f.write_str("undefined"),
        }
    }
}

/// ACC/REC/SPE/PRE/F1 of one confusion matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MetricsReport {
    pub accuracy: MetricValue,
    pub recall: MetricValue,
    pub specificity: MetricValue,
    pub precision: MetricValue,
    pub f1: MetricValue,
}

/// Compute the five metrics; zero-denominator metrics come back undefined.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyConfusion);
    }
    let tp = cm.true_positives;
    let fp = cm.false_positives;
    let tn = cm.true_negatives;
    let fn_ = cm.false_negatives;
    let recall = MetricValue::ratio(tp, tp + fn_);
    let precision = MetricValue::ratio(tp, tp + fp);
    // 2PR/(P+R) collapses to the integer fraction 2TP/(2TP+FP+FN); defined
    // only when P and R are defined and P+R > 0 (i.e. TP > 0)
    let f1 = if recall.is_defined() && precision.is_defined() && tp > 0 {
        MetricValue::ratio(2 * tp, 2 * tp + fp + fn_)
    } else {
        MetricValue::Undefined
    };
    Ok(MetricsReport {
        accuracy: MetricValue::ratio(tp + tn, total),
        recall,
        specificity: MetricValue::ratio(tn, tn + fp),
        precision,
        f1,
    })
}

/// How segments are partitioned into folds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    SegmentStratified,
    SubjectGrouped,
}

impl SplitMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitMode::SegmentStratified => "segment_stratified",
            SplitMode::SubjectGrouped => "subject_grouped",
        }
    }
}

impl FromStr for SplitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "segment_stratified" | "segment-stratified" => Ok(SplitMode::SegmentStratified),
            "subject_grouped" | "subject-grouped" => Ok(SplitMode::SubjectGrouped),
            other => Err(Error::BadFlagValue {
                flag: "split".into(),
                detail: format!(
                    "expected segment_stratified or subject_grouped, got `{other}`"
                ),
            }),
        }
    }
}

impl fmt::Display for SplitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A disjoint, exhaustive assignment of segments to folds.
#[derive(Clone, Debug)]
pub struct FoldPlan {
    k: usize,
    assignments: Vec<usize>,
    mode: SplitMode,
    seed: u64,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Fold id per segment index.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn mode(&self) -> SplitMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Partition the matrix rows into `k` folds, deterministically for a seed.
///
/// `segment_stratified` deals each class's shuffled segments round-robin, so
/// per-fold class counts differ from perfect stratification by at most one.
/// `subject_grouped` keeps every subject inside one fold, balancing fold
/// sizes greedily.
pub fn make_folds(
    matrix: &FeatureMatrix,
    k: usize,
    mode: SplitMode,
    seed: u64,
) -> Result<FoldPlan> {
    let n = matrix.n_rows();
    let mut rng = DetRng::new(seed);
    let assignments = match mode {
        SplitMode::SegmentStratified => {
            if k < 2 || k > n {
                return Err(Error::BadFoldCount {
                    k,
                    groups: n,
                    unit: "segments".into(),
                });
            }
            let mut assignments = vec![0usize; n];
            for class in [Label::Positive, Label::Negative] {
                let mut members: Vec<usize> = matrix
                    .labels()
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l == class)
                    .map(|(i, _)| i)
                    .collect();
                rng.shuffle(&mut members);
                for (position, &index) in members.iter().enumerate() {
                    assignments[index] = position % k;
                }
            }
            assignments
        }
        SplitMode::SubjectGrouped => {
            // subjects in first-appearance order, then shuffled
            let mut subjects: Vec<(String, Vec<usize>)> = Vec::new();
            for (i, source) in matrix.sources().iter().enumerate() {
                match subjects
                    .iter_mut()
                    .find(|(id, _)| id == &source.subject_id)
                {
                    Some((_, rows)) => rows.push(i),
                    None => subjects.push((source.subject_id.clone(), vec![i])),
                }
            }
            if k < 2 || k > subjects.len() {
                return Err(Error::BadFoldCount {
                    k,
                    groups: subjects.len(),
                    unit: "subjects".into(),
                });
            }
            rng.shuffle(&mut subjects);
            let mut fold_sizes = vec![0usize; k];
            let mut assignments = vec![0usize; n];
            for (_, rows) in &subjects {
                let smallest = (0..k).min_by_key(|&f| (fold_sizes[f], f)).unwrap();
                for &row in rows {
                    assignments[row] = smallest;
                }
                fold_sizes[smallest] += rows.len();
            }
            assignments
        }
    };
    Ok(FoldPlan {
        k,
        assignments,
        mode,
        seed,
    })
}

/// Dataset shape echoed into reports.
#[derive(Clone, Debug, Serialize)]
pub struct DatasetSummary {
    pub segments: usize,
    pub positive: usize,
    pub negative: usize,
    pub sample_rate: u32,
    pub window_len: usize,
}

/// Decompose and featurize every segment of a manifest.
pub fn compute_features(
    manifest: &DatasetManifest,
    base_dir: &Path,
    config: &ExperimentConfig,
) -> Result<(FeatureMatrix, DatasetSummary, Vec<String>)> {
    let spec = WaveletSpec::by_name(&config.wavelet)?;
    let loaded = dataset_io::load_dataset(manifest, base_dir, config.duration_ms)?;
    let mut matrix = FeatureMatrix::new(features::feature_names(config.levels));
    for segment in &loaded.segments {
        let mut samples = segment.samples.clone();
        if config.prenorm_signal {
            dataset_io::zscore_signal(&mut samples);
        }
        let decomp = dwt_decompose(&samples, &spec, config.levels, config.boundary)?;
        let vector = features::extract_features(&decomp)?;
        matrix.push(vector, segment.label, segment.source.clone())?;
    }
    let (positive, negative) = matrix.class_counts();
    let summary = DatasetSummary {
        segments: matrix.n_rows(),
        positive,
        negative,
        sample_rate: loaded.sample_rate,
        window_len: dataset_io::window_length(loaded.sample_rate, config.duration_ms),
    };
    Ok((matrix, summary, loaded.warnings))
}

/// Resolve the kernel for a training matrix: explicit gamma wins, otherwise
/// the variance heuristic on the (already normalized) training rows.
pub fn resolve_kernel(config: &ExperimentConfig, train_rows: &[Vec<f64>]) -> KernelSpec {
    match config.kernel {
        KernelKind::Linear => KernelSpec::Linear,
        KernelKind::Rbf => {
            let gamma = config
                .gamma
                .unwrap_or_else(|| rbf_gamma_heuristic(train_rows));
            KernelSpec::Rbf { gamma }
        }
    }
}

/// Training controls derived from the experiment config.
pub fn train_config(config: &ExperimentConfig, seed: u64) -> TrainConfig {
    TrainConfig {
        c: config.c,
        seed,
        ..TrainConfig::default()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FoldReport {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// Resolved RBF gamma for the fold, when the kernel is rbf.
    pub gamma: Option<f64>,
    pub constant_columns: Vec<String>,
    pub test_segments: Vec<SegmentSource>,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct PooledReport {
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct WaveletInfo {
    pub name: String,
    pub filter_len: usize,
    pub vanishing_moments: usize,
}

/// Full cross-validation result with the resolved config echoed in.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub generated_at_unix: u64,
    pub config: ExperimentConfig,
    pub wavelet: WaveletInfo,
    pub feature_statistics: Vec<StatDefinition>,
    pub feature_names: Vec<String>,
    pub dataset: DatasetSummary,
    pub warnings: Vec<String>,
    pub folds: Vec<FoldReport>,
    pub pooled: PooledReport,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Run the full cross-validated experiment: per fold, fit the normalizer on
/// the training rows (or globally in paper mode), train the SVM, predict the
/// held-out rows, and pool the confusion counts across folds.
pub fn run_experiment(
    manifest: &DatasetManifest,
    base_dir: &Path,
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    config.validate()?;
    let spec = WaveletSpec::by_name(&config.wavelet)?;
    let (matrix, dataset, mut warnings) = compute_features(manifest, base_dir, config)?;
    let (positive, negative) = matrix.class_counts();
    if positive == 0 || negative == 0 {
        return Err(Error::MissingClass { positive, negative });
    }
    if config.split == SplitMode::SegmentStratified {
        warnings.push(
            "segment_stratified split: segments of one subject may appear in both \
             training and test folds (identity leakage); use subject_grouped to rule \
             this out"
                .to_string(),
        );
    }
    if config.paper_mode {
        warnings.push(
            "paper mode: normalization fitted on the full dataset before splitting \
             (train/test leakage by design)"
                .to_string(),
        );
    }

    let plan = make_folds(&matrix, config.folds, config.split, config.seed)?;
    let global_params: Option<NormalizationParams> = if config.paper_mode
        && config.norm != NormMethod::None
    {
        Some(fit_normalizer(config.norm, &matrix)?)
    } else {
        None
    };

    let mut folds = Vec::with_capacity(plan.k());
    let mut pooled = ConfusionMatrix::default();
    for fold in 0..plan.k() {
        let result: Result<FoldReport> = (|| {
            let train_idx = plan.train_indices(fold);
            let test_idx = plan.test_indices(fold);
            let train = matrix.select(&train_idx);
            let test = matrix.select(&test_idx);
            let params = match &global_params {
                Some(params) => params.clone(),
                None => fit_normalizer(config.norm, &train)?,
            };
            let train_scaled = apply_normalizer(&params, &train)?;
            let test_scaled = apply_normalizer(&params, &test)?;
            let labels: Vec<f64> = train_scaled.labels().iter().map(|l| l.to_sign()).collect();
            let kernel = resolve_kernel(config, train_scaled.rows());
            let model = train_smo(
                train_scaled.rows(),
                &labels,
                &kernel,
                &train_config(config, fold_seed(config.seed, fold)),
            )?;
            let mut cm = ConfusionMatrix::default();
            for (row, &truth) in test_scaled.rows().iter().zip(test_scaled.labels()) {
                let (predicted, _) = model.predict(row)?;
                cm.record(truth, predicted);
            }
            Ok(FoldReport {
                fold,
                train_size: train_idx.len(),
                test_size: test_idx.len(),
                gamma: kernel.gamma(),
                constant_columns: params.constant_column_names(),
                test_segments: test.sources().to_vec(),
                confusion: cm,
                metrics: metrics(&cm)?,
            })
        })();
        let fold_report = result.map_err(|err| Error::in_fold(fold, err))?;
        pooled.merge(&fold_report.confusion);
        folds.push(fold_report);
    }

    Ok(ExperimentReport {
        generated_at_unix: unix_now(),
        config: config.clone(),
        wavelet: WaveletInfo {
            name: spec.name().to_string(),
            filter_len: spec.filter_len(),
            vanishing_moments: spec.vanishing_moments(),
        },
        feature_statistics: features::stat_definitions(),
        feature_names: matrix.feature_names().to_vec(),
        dataset,
        warnings,
        folds,
        pooled: PooledReport {
            confusion: pooled,
            metrics: metrics(&pooled)?,
        },
    })
}
