//! Command dispatch and artifact persistence behind the `coughwave` binary.
//!
//! Commands: `extract`, `train`, `evaluate`, `cross-validate`, `dump-coeffs`.
//! Flag values override config-file values, which override defaults. Every
//! failure is reported with the stage that produced it and a nonzero exit
//! code.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::{ConfigPatch, ExperimentConfig};
use crate::dataset_io::{self, DatasetManifest};
use crate::error::{Error, Result};
use crate::eval::{self, metrics, ConfusionMatrix, MetricsReport};
use crate::features::{self, FeatureMatrix};
use crate::normalize::{apply_normalizer, fit_normalizer, NormalizationParams};
use crate::svm::{train_smo, ModelFile, SvmModel};
use crate::wavelet::{dwt_decompose, WaveletSpec};

pub const USAGE: &str = "\
coughwave - cough-audio classification by wavelet features and a kernel SVM

USAGE:
    coughwave <COMMAND> --manifest <path> [flags]

COMMANDS:
    extract         write the feature matrix of a manifest as CSV
    train           fit the normalizer and SVM on a whole manifest
    evaluate        score a trained model (--model) against a manifest
    cross-validate  k-fold cross validation with a pooled confusion matrix
    dump-coeffs     write per-segment wavelet coefficient CSVs

FLAGS (defaults in parentheses):
    --manifest <path>      dataset manifest CSV (required)
    --config <path>        JSON config file; flags override its values
    --wavelet <name>       haar or db2..db10 (db4)
    --levels <n>           decomposition depth (5)
    --boundary <mode>      symmetric | periodic (symmetric)
    --duration-ms <n>      segment window in milliseconds (1640)
    --prenorm-signal       z-score each raw segment before the transform
    --norm <method>        zscore | minmax | none (zscore)
    --paper-mode           fit normalization on the full dataset (leaky)
    --kernel <kind>        rbf | linear (rbf)
    --gamma <x>            rbf bandwidth (auto: 1/(d*var))
    --c <x>                SVM box constraint (1.0)
    --folds <k>            cross-validation folds (10)
    --split <mode>         segment_stratified | subject_grouped (segment_stratified)
    --seed <n>             seed for every random choice (42)
    --model <path>         trained model JSON, for evaluate
    --out <dir>            artifact output directory (.)
";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Extract,
    Train,
    Evaluate,
    CrossValidate,
    DumpCoeffs,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Extract => "extract",
            Command::Train => "train",
            Command::Evaluate => "evaluate",
            Command::CrossValidate => "cross-validate",
            Command::DumpCoeffs => "dump-coeffs",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "extract" => Ok(Command::Extract),
            "train" => Ok(Command::Train),
            "evaluate" => Ok(Command::Evaluate),
            "cross-validate" => Ok(Command::CrossValidate),
            "dump-coeffs" => Ok(Command::DumpCoeffs),
            other => Err(Error::UnknownCommand(other.to_string())),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct Invocation {
    pub command: Command,
    pub config: ExperimentConfig,
}

/// Parse a command line (without the program name). Flags override config
/// file values, which override defaults, regardless of argument order.
pub fn parse_cli(args: &[String]) -> Result<Invocation> {
    let mut iter = args.iter();
    let command: Command = iter
        .next()
        .ok_or(Error::MissingCommand)?
        .parse()?;

    let mut flag_patch = ConfigPatch::default();
    let mut config_file: Option<PathBuf> = None;
    while let Some(flag) = iter.next() {
        let mut value_of = |flag: &str| -> Result<String> {
            iter.next().cloned().ok_or_else(|| Error::MissingFlagValue {
                flag: flag.to_string(),
            })
        };
        match flag.as_str() {
            "--manifest" => flag_patch.manifest = Some(PathBuf::from(value_of("--manifest")?)),
            "--config" => config_file = Some(PathBuf::from(value_of("--config")?)),
            "--wavelet" => flag_patch.wavelet = Some(value_of("--wavelet")?),
            "--levels" => {
                flag_patch.levels = Some(parse_number(&value_of("--levels")?, "--levels")?)
            }
            "--boundary" => flag_patch.boundary = Some(value_of("--boundary")?),
            "--duration-ms" => {
                flag_patch.duration_ms =
                    Some(parse_number(&value_of("--duration-ms")?, "--duration-ms")?)
            }
            "--prenorm-signal" => flag_patch.prenorm_signal = Some(true),
            "--norm" => flag_patch.norm = Some(value_of("--norm")?),
            "--paper-mode" => flag_patch.paper_mode = Some(true),
            "--kernel" => flag_patch.kernel = Some(value_of("--kernel")?),
            "--gamma" => flag_patch.gamma = Some(parse_number(&value_of("--gamma")?, "--gamma")?),
            "--c" => flag_patch.c = Some(parse_number(&value_of("--c")?, "--c")?),
            "--folds" => flag_patch.folds = Some(parse_number(&value_of("--folds")?, "--folds")?),
            "--split" => flag_patch.split = Some(value_of("--split")?),
            "--seed" => flag_patch.seed = Some(parse_number(&value_of("--seed")?, "--seed")?),
            "--model" => flag_patch.model = Some(PathBuf::from(value_of("--model")?)),
            "--out" => flag_patch.out = Some(PathBuf::from(value_of("--out")?)),
            other => return Err(Error::UnknownFlag(other.to_string())),
        }
    }

    let mut config = ExperimentConfig::default();
    if let Some(path) = config_file {
        ConfigPatch::load(&path)?.apply_to(&mut config)?;
    }
    flag_patch.apply_to(&mut config)?;
    config.validate()?;
    if command == Command::Evaluate && config.model.is_none() {
        return Err(Error::InvalidConfig(
            "evaluate requires --model <path>".into(),
        ));
    }
    Ok(Invocation { command, config })
}

fn parse_number<T: FromStr>(text: &str, flag: &str) -> Result<T> {
    text.parse().map_err(|_| Error::BadFlagValue {
        flag: flag.trim_start_matches('-').to_string(),
        detail: format!("`{text}` is not a valid value"),
    })
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::WriteArtifact {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("artifact serialization");
    text.push('\n');
    write_text(path, &text)
}

/// Sidecar metadata for CSV artifacts: the resolved config and the feature
/// statistic definitions, so every artifact is self-describing.
#[derive(Serialize)]
struct CsvMeta<'a> {
    generated_at_unix: u64,
    config: &'a ExperimentConfig,
    feature_statistics: Vec<features::StatDefinition>,
}

#[derive(Serialize)]
struct TrainedModelArtifact<'a> {
    #[serde(flatten)]
    model: ModelFile,
    config: &'a ExperimentConfig,
    generated_at_unix: u64,
}

#[derive(Serialize)]
struct EvaluationArtifact<'a> {
    generated_at_unix: u64,
    config: &'a ExperimentConfig,
    model_path: String,
    feature_statistics: Vec<features::StatDefinition>,
    segments: usize,
    confusion: ConfusionMatrix,
    metrics: MetricsReport,
}

fn load_manifest_for(config: &ExperimentConfig) -> Result<(DatasetManifest, PathBuf)> {
    let manifest = dataset_io::load_manifest(&config.manifest)?;
    Ok((manifest, config.manifest_dir()))
}

fn trained_model(
    config: &ExperimentConfig,
    matrix: &FeatureMatrix,
) -> Result<(SvmModel, NormalizationParams)> {
    let (positive, negative) = matrix.class_counts();
    if positive == 0 || negative == 0 {
        return Err(Error::MissingClass { positive, negative });
    }
    let params = fit_normalizer(config.norm, matrix)?;
    let scaled = apply_normalizer(&params, matrix)?;
    let labels: Vec<f64> = scaled.labels().iter().map(|l| l.to_sign()).collect();
    let kernel = eval::resolve_kernel(config, scaled.rows());
    let model = train_smo(
        scaled.rows(),
        &labels,
        &kernel,
        &eval::train_config(config, config.seed),
    )?;
    Ok((model, params))
}

/// Execute a parsed invocation, returning the artifact paths written.
pub fn execute(invocation: &Invocation) -> Result<Vec<PathBuf>> {
    let config = &invocation.config;
    fs::create_dir_all(&config.out).map_err(|source| Error::WriteArtifact {
        path: config.out.clone(),
        source,
    })?;
    let mut artifacts = Vec::new();
    match invocation.command {
        Command::Extract => {
            let (manifest, base_dir) = load_manifest_for(config)?;
            let (matrix, _, _) = eval::compute_features(&manifest, &base_dir, config)?;
            let csv_path = config.out.join("features.csv");
            let mut buf = Vec::new();
            matrix
                .write_csv(&mut buf)
                .map_err(|source| Error::WriteArtifact {
                    path: csv_path.clone(),
                    source,
                })?;
            write_text(&csv_path, &String::from_utf8(buf).expect("csv is utf-8"))?;
            let meta_path = config.out.join("features.meta.json");
            write_json(
                &meta_path,
                &CsvMeta {
                    generated_at_unix: unix_now(),
                    config,
                    feature_statistics: features::stat_definitions(),
                },
            )?;
            println!(
                "extracted {} x {} feature matrix -> {}",
                matrix.n_rows(),
                matrix.n_cols(),
                csv_path.display()
            );
            artifacts.push(csv_path);
            artifacts.push(meta_path);
        }
        Command::Train => {
            let (manifest, base_dir) = load_manifest_for(config)?;
            let (matrix, _, _) = eval::compute_features(&manifest, &base_dir, config)?;
            let (model, params) = trained_model(config, &matrix)?;
            let params_path = config.out.join("params.json");
            write_json(&params_path, &params)?;
            let model_path = config.out.join("model.json");
            write_json(
                &model_path,
                &TrainedModelArtifact {
                    model: ModelFile::from_model(
                        &model,
                        matrix.feature_names().to_vec(),
                        Some("params.json".into()),
                    ),
                    config,
                    generated_at_unix: unix_now(),
                },
            )?;
            println!(
                "trained on {} segments ({} support vectors) -> {}",
                matrix.n_rows(),
                model.support_vectors().len(),
                model_path.display()
            );
            artifacts.push(model_path);
            artifacts.push(params_path);
        }
        Command::Evaluate => {
            let model_path = config.model.clone().expect("checked at parse time");
            let model_file = ModelFile::load(&model_path)?;
            let params = match &model_file.normalization_params_ref {
                Some(reference) => {
                    let params_path = model_path
                        .parent()
                        .unwrap_or_else(|| Path::new("."))
                        .join(reference);
                    let text =
                        fs::read_to_string(&params_path).map_err(|source| Error::Io {
                            path: params_path.clone(),
                            source,
                        })?;
                    Some(NormalizationParams::from_json(&text)?)
                }
                None => None,
            };
            let feature_names = model_file.feature_names.clone();
            let model = model_file.into_model(&model_path)?;
            let (manifest, base_dir) = load_manifest_for(config)?;
            let (matrix, _, _) = eval::compute_features(&manifest, &base_dir, config)?;
            if matrix.feature_names() != feature_names.as_slice() {
                return Err(Error::InvalidConfig(format!(
                    "model expects {} features ({}..), manifest produced {}",
                    feature_names.len(),
                    feature_names.first().map(String::as_str).unwrap_or(""),
                    matrix.n_cols()
                )));
            }
            let scaled = match &params {
                Some(params) => apply_normalizer(params, &matrix)?,
                None => matrix.clone(),
            };
            let mut cm = ConfusionMatrix::default();
            for (row, &truth) in scaled.rows().iter().zip(scaled.labels()) {
                let (predicted, _) = model.predict(row)?;
                cm.record(truth, predicted);
            }
            let report = metrics(&cm)?;
            let out_path = config.out.join("metrics.json");
            write_json(
                &out_path,
                &EvaluationArtifact {
                    generated_at_unix: unix_now(),
                    config,
                    model_path: model_path.display().to_string(),
                    feature_statistics: features::stat_definitions(),
                    segments: scaled.n_rows(),
                    confusion: cm,
                    metrics: report,
                },
            )?;
            println!(
                "evaluated {} segments: ACC={} REC={} SPE={} PRE={} F1={}",
                scaled.n_rows(),
                report.accuracy,
                report.recall,
                report.specificity,
                report.precision,
                report.f1
            );
            artifacts.push(out_path);
        }
        Command::CrossValidate => {
            let (manifest, base_dir) = load_manifest_for(config)?;
            let report = eval::run_experiment(&manifest, &base_dir, config)?;
            let out_path = config.out.join("report.json");
            write_json(&out_path, &report)?;
            let cm = &report.pooled.confusion;
            println!(
                "pooled over {} folds: TP={} FP={} TN={} FN={}",
                report.folds.len(),
                cm.true_positives,
                cm.false_positives,
                cm.true_negatives,
                cm.false_negatives
            );
            let m = &report.pooled.metrics;
            println!(
                "ACC={} REC={} SPE={} PRE={} F1={}",
                m.accuracy, m.recall, m.specificity, m.precision, m.f1
            );
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            artifacts.push(out_path);
        }
        Command::DumpCoeffs => {
            let (manifest, base_dir) = load_manifest_for(config)?;
            let spec = WaveletSpec::by_name(&config.wavelet)?;
            let loaded = dataset_io::load_dataset(&manifest, &base_dir, config.duration_ms)?;
            for segment in &loaded.segments {
                let mut samples = segment.samples.clone();
                if config.prenorm_signal {
                    dataset_io::zscore_signal(&mut samples);
                }
                let decomp = dwt_decompose(&samples, &spec, config.levels, config.boundary)?;
                let name = format!(
                    "coeffs_{}_{:04}.csv",
                    segment.source.subject_id, segment.source.segment_index
                );
                let path = config.out.join(name);
                let mut buf = Vec::new();
                decomp
                    .write_band_csv(&mut buf)
                    .map_err(|source| Error::WriteArtifact {
                        path: path.clone(),
                        source,
                    })?;
                write_text(&path, &String::from_utf8(buf).expect("csv is utf-8"))?;
                artifacts.push(path);
            }
            let meta_path = config.out.join("coeffs.meta.json");
            write_json(
                &meta_path,
                &CsvMeta {
                    generated_at_unix: unix_now(),
                    config,
                    feature_statistics: features::stat_definitions(),
                },
            )?;
            println!(
                "dumped {} coefficient files -> {}",
                loaded.segments.len(),
                config.out.display()
            );
            artifacts.push(meta_path);
        }
    }
    Ok(artifacts)
}

/// CLI entry point: parse, execute, and map errors to stage-tagged messages
/// and exit codes (0 success, 1 runtime failure, 2 usage error).
pub fn run<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let args: Vec<String> = args.into_iter().collect();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        print!("{USAGE}");
        return 0;
    }
    if args.is_empty() {
        eprint!("{USAGE}");
        return 2;
    }
    let invocation = match parse_cli(&args) {
        Ok(invocation) => invocation,
        Err(err) => {
            eprintln!("error[{}]: {err}", err.stage());
            return 2;
        }
    };
    match execute(&invocation) {
        Ok(_) => 0,
        Err(err) => {
            eprintln!("error[{}]: {err}", err.stage());
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::KernelKind;
    use crate::eval::SplitMode;
    use crate::normalize::NormMethod;

    fn parse(tokens: &[&str]) -> Result<Invocation> {
        let args: Vec<String> = tokens.iter().map(|t| t.to_string()).collect();
        parse_cli(&args)
    }

    #[test]
    fn defaults_with_only_a_manifest() {
        let inv = parse(&["cross-validate", "--manifest", "data/m.csv"]).unwrap();
        assert_eq!(inv.command, Command::CrossValidate);
        let c = &inv.config;
        assert_eq!(c.wavelet, "db4");
        assert_eq!(c.levels, 5);
        assert_eq!(c.duration_ms, 1640);
        assert_eq!(c.norm, NormMethod::ZScore);
        assert_eq!(c.kernel, KernelKind::Rbf);
        assert_eq!(c.folds, 10);
        assert_eq!(c.split, SplitMode::SegmentStratified);
    }

    #[test]
    fn flag_overrides() {
        let inv = parse(&[
            "cross-validate",
            "--manifest",
            "m.csv",
            "--norm",
            "minmax",
            "--paper-mode",
        ])
        .unwrap();
        assert_eq!(inv.config.norm, NormMethod::MinMax);
        assert!(inv.config.paper_mode);
    }

    #[test]
    fn levels_zero_is_rejected() {
        let err = parse(&["extract", "--manifest", "m.csv", "--levels", "0"]).unwrap_err();
        assert!(err.to_string().contains("levels must be >= 1"));
    }

    #[test]
    fn unknown_flags_and_commands_are_rejected() {
        assert!(matches!(
            parse(&["extract", "--manifest", "m.csv", "--frobnicate"]),
            Err(Error::UnknownFlag(_))
        ));
        assert!(matches!(
            parse(&["transmogrify"]),
            Err(Error::UnknownCommand(_))
        ));
        assert!(matches!(parse(&[]), Err(Error::MissingCommand)));
        assert!(matches!(
            parse(&["extract", "--manifest"]),
            Err(Error::MissingFlagValue { .. })
        ));
    }

    #[test]
    fn evaluate_requires_a_model() {
        let err = parse(&["evaluate", "--manifest", "m.csv"]).unwrap_err();
        assert!(err.to_string().contains("--model"));
    }

    #[test]
    fn config_file_sits_between_defaults_and_flags() {
        let dir = tempfile::tempdir().unwrap();
        let config_path = dir.path().join("config.json");
        fs::write(
            &config_path,
            r#"{"manifest": "from_file.csv", "norm": "minmax", "seed": 5, "folds": 4}"#,
        )
        .unwrap();
        let inv = parse(&[
            "cross-validate",
            "--config",
            config_path.to_str().unwrap(),
            "--seed",
            "9",
        ])
        .unwrap();
        // file set the manifest, norm and folds; the flag beat the file's seed
        assert_eq!(inv.config.manifest, PathBuf::from("from_file.csv"));
        assert_eq!(inv.config.norm, NormMethod::MinMax);
        assert_eq!(inv.config.folds, 4);
        assert_eq!(inv.config.seed, 9);
    }

    #[test]
    fn bad_numbers_are_flag_errors() {
        assert!(matches!(
            parse(&["extract", "--manifest", "m.csv", "--folds", "ten"]),
            Err(Error::BadFlagValue { .. })
        ));
        assert!(matches!(
            parse(&["extract", "--manifest", "m.csv", "--gamma", "x"]),
            Err(Error::BadFlagValue { .. })
        ));
    }
}
