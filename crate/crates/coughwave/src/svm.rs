//! Two-class kernel SVM: kernel evaluation, dual training by sequential
//! minimal optimization, and prediction.
//!
//! The solver is the simplified two-variable SMO: sweep the training points,
//! and for each KKT violator pick a partner index starting from a seeded
//! random position (falling back to a full scan so progress is never missed),
//! then solve the two-variable subproblem analytically. Training is
//! deterministic for a fixed seed. After convergence the bias is recomputed
//! canonically from the KKT interval so that identical duals always produce
//! identical decision functions.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset_io::Label;
use crate::error::{Error, Result};

/// Kernel selection. RBF is `exp(-gamma * ||x - y||^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
}

impl KernelSpec {
    pub fn rbf(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && gamma.is_finite() {
            Ok(KernelSpec::Rbf { gamma })
        } else {
            Err(Error::BadGamma(gamma))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "linear",
            KernelSpec::Rbf { .. } => "rbf",
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self {
            KernelSpec::Linear => None,
            KernelSpec::Rbf { gamma } => Some(*gamma),
        }
    }

    fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            KernelSpec::Linear => x.iter().zip(y).map(|(a, b)| a * b).sum(),
            KernelSpec::Rbf { gamma } => {
                let dist_sq: f64 = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| {
                        let d = a - b;
                        d * d
                    })
                    .sum();
                (-gamma * dist_sq).exp()
            }
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => f.write_str("linear"),
            KernelSpec::Rbf { gamma } => write!(f, "rbf(gamma={gamma})"),
        }
    }
}

/// Evaluate a kernel on two equal-dimension vectors.
pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            a: x.len(),
            b: y.len(),
        });
    }
    Ok(spec.eval_unchecked(x, y))
}

/// Solver controls.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Box constraint.
    pub c: f64,
    /// KKT slack at which a point counts as a violator.
    pub tolerance: f64,
    /// Consecutive sweeps without an update before the solver stops.
    pub max_passes: usize,
    pub seed: u64,
    /// Multiplier on C for positive-class points (1.0 = no class weighting).
    pub positive_class_weight: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c: 1.0,
            tolerance: 1e-3,
            max_passes: 100,
            seed: 42,
            positive_class_weight: 1.0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::BadTrainConfig(format!("C must be positive, got {}", self.c)));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::BadTrainConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !(self.positive_class_weight > 0.0 && self.positive_class_weight.is_finite()) {
            return Err(Error::BadTrainConfig(format!(
                "positive class weight must be positive, got {}",
                self.positive_class_weight
            )));
        }
        Ok(())
    }
}

/// Trained classifier: support vectors, their signed dual coefficients
/// `alpha_i * y_i`, and the bias. `+1` maps to [`Label::Positive`].
#[derive(Clone, Debug)]
pub struct SvmModel {
    support_vectors: Vec<Vec<f64>>,
    dual_coeffs: Vec<f64>,
    support_indices: Vec<usize>,
    bias: f64,
    kernel: KernelSpec,
    c: f64,
}

impl SvmModel {
    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.support_vectors
    }

    pub fn dual_coeffs(&self) -> &[f64] {
        &self.dual_coeffs
    }

    /// Training-row indices the support vectors came from.
    pub fn support_indices(&self) -> &[usize] {
        &self.support_indices
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dimension(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    /// Decision value and label; a decision of exactly zero resolves to
    /// positive so the confusion matrix stays deterministic.
    pub fn predict(&self, x: &[f64]) -> Result<(Label, f64)> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                a: self.dimension(),
                b: x.len(),
            });
        }
        let decision = self
            .support_vectors
            .iter()
            .zip(&self.dual_coeffs)
            .map(|(sv, coeff)| coeff * self.kernel.eval_unchecked(sv, x))
            .sum::<f64>()
            + self.bias;
        let label = if decision >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        };
        Ok((label, decision))
    }

    /// Assemble a model directly from dual variables, deriving the bias the
    /// same way training does. Lets an external solver's duals be compared
    /// through the same prediction path.
    pub fn from_duals(
        x: &[Vec<f64>],
        y: &[f64],
        alphas: &[f64],
        kernel: KernelSpec,
        c: f64,
        positive_class_weight: f64,
    ) -> Result<SvmModel> {
        let gram = gram_matrix(x, &kernel);
        let boxes: Vec<f64> = y
            .iter()
            .map(|&yi| if yi > 0.0 { c * positive_class_weight } else { c })
            .collect();
        let bias = canonical_bias(&gram, y, alphas, &boxes);
        Ok(extract_model(x, y, alphas, bias, kernel, c))
    }
}

fn gram_matrix(x: &[Vec<f64>], kernel: &KernelSpec) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut gram = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = kernel.eval_unchecked(&x[i], &x[j]);
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    gram
}

fn decision_without_bias(gram: &[Vec<f64>], y: &[f64], alphas: &[f64], i: usize) -> f64 {
    alphas
        .iter()
        .zip(y)
        .zip(&gram[i])
        .map(|((&a, &yy), &k)| a * yy * k)
        .sum()
}

/// Bias from the KKT interval: free support vectors pin it exactly; with
/// none, take the midpoint of the feasible range.
fn canonical_bias(gram: &[Vec<f64>], y: &[f64], alphas: &[f64], boxes: &[f64]) -> f64 {
    let n = y.len();
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for i in 0..n {
        let target = y[i] - decision_without_bias(gram, y, alphas, i);
        let lo_eps = boxes[i] * 1e-9;
        let hi_eps = boxes[i] * (1.0 - 1e-9);
        if alphas[i] > lo_eps && alphas[i] < hi_eps {
            free_sum += target;
            free_count += 1;
        } else if alphas[i] <= lo_eps {
            // margin constraint y_i f(x_i) >= 1
            if y[i] > 0.0 {
                lower = lower.max(target);
            } else {
                upper = upper.min(target);
            }
        } else {
            // at the box: y_i f(x_i) <= 1
            if y[i] > 0.0 {
                upper = upper.min(target);
            } else {
                lower = lower.max(target);
            }
        }
    }
    if free_count > 0 {
        free_sum / free_count as f64
    } else if lower.is_finite() && upper.is_finite() {
        0.5 * (lower + upper)
    } else if lower.is_finite() {
        lower
    } else if upper.is_finite() {
        upper
    } else {
        0.0
    }
}

fn extract_model(
    x: &[Vec<f64>],
    y: &[f64],
    alphas: &[f64],
    bias: f64,
    kernel: KernelSpec,
    c: f64,
) -> SvmModel {
    let threshold = c * 1e-9;
    let mut support_vectors = Vec::new();
    let mut dual_coeffs = Vec::new();
    let mut support_indices = Vec::new();
    for (i, &alpha) in alphas.iter().enumerate() {
        if alpha > threshold {
            support_vectors.push(x[i].clone());
            dual_coeffs.push(alpha * y[i]);
            support_indices.push(i);
        }
    }
    if support_vectors.is_empty() {
        // a converged two-class model always has active duals; keep any
        // nonzero ones rather than emit an empty model
        for (i, &alpha) in alphas.iter().enumerate() {
            if alpha > 0.0 {
                support_vectors.push(x[i].clone());
                dual_coeffs.push(alpha * y[i]);
                support_indices.push(i);
            }
        }
    }
    SvmModel {
        support_vectors,
        dual_coeffs,
        support_indices,
        bias,
        kernel,
        c,
    }
}

/// Default RBF bandwidth: `1 / (d * var)` with `var` the mean per-column
/// sample variance of the training matrix.
pub fn rbf_gamma_heuristic(x: &[Vec<f64>]) -> f64 {
    let n = x.len();
    let d = x.first().map_or(0, Vec::len);
    if n < 2 || d == 0 {
        return 1.0;
    }
    let mut var_sum = 0.0;
    for j in 0..d {
        let mean = x.iter().map(|row| row[j]).sum::<f64>() / n as f64;
        let ss: f64 = x
            .iter()
            .map(|row| {
                let dlt = row[j] - mean;
                dlt * dlt
            })
            .sum();
        var_sum += ss / (n - 1) as f64;
    }
    let mean_var = var_sum / d as f64;
    if mean_var > f64::MIN_POSITIVE {
        1.0 / (d as f64 * mean_var)
    } else {
        1.0
    }
}

/// Train by sequential minimal optimization. `y` must be -1/+1 with at least
/// one example of each class; the result is deterministic for a fixed seed.
pub fn train_smo(
    x: &[Vec<f64>],
    y: &[f64],
    kernel: &KernelSpec,
    config: &TrainConfig,
) -> Result<SvmModel> {
    config.validate()?;
    let n = x.len();
    if n != y.len() {
        return Err(Error::LengthMismatch {
            truth: y.len(),
            predicted: n,
        });
    }
    if n < 2 {
        return Err(Error::SingleClass);
    }
    let dim = x[0].len();
    for (row_idx, row) in x.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                a: dim,
                b: row.len(),
            });
        }
        for (col, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteFeature { row: row_idx, col });
            }
        }
    }
    let mut has_positive = false;
    let mut has_negative = false;
    for &label in y {
        if label == 1.0 {
            has_positive = true;
        } else if label == -1.0 {
            has_negative = true;
        } else {
            return Err(Error::BadLabel(label));
        }
    }
    if !(has_positive && has_negative) {
        return Err(Error::SingleClass);
    }

    let gram = gram_matrix(x, kernel);
    let boxes: Vec<f64> = y
        .iter()
        .map(|&yi| {
            if yi > 0.0 {
                config.c * config.positive_class_weight
            } else {
                config.c
            }
        })
        .collect();

    let mut alphas = vec![0.0f64; n];
    let mut bias = 0.0f64;
    let mut rng = crate::rng::DetRng::new(config.seed);
    let tol = config.tolerance;
    // progress cutoff shrinks with the tolerance so tight runs converge fully
    let min_step = 1e-5f64.min(tol * 0.1);
    let box_eps = 1e-12;

    let error_of = |alphas: &[f64], bias: f64, i: usize| -> f64 {
        decision_without_bias(&gram, y, alphas, i) + bias - y[i]
    };

    let mut quiet_sweeps = 0usize;
    let mut total_sweeps = 0usize;
    let sweep_cap = 10_000usize.max(config.max_passes * 20);
    while quiet_sweeps < config.max_passes && total_sweeps < sweep_cap {
        total_sweeps += 1;
        let mut changed = 0usize;
        for i in 0..n {
            let e_i = error_of(&alphas, bias, i);
            let r_i = y[i] * e_i;
            let violates = (r_i < -tol && alphas[i] < boxes[i] - box_eps)
                || (r_i > tol && alphas[i] > box_eps);
            if !violates {
                continue;
            }
            // randomized partner start, full ring scan as fallback
            let start = rng.below(n);
            for offset in 0..n {
                let j = (start + offset) % n;
                if j == i {
                    continue;
                }
                let e_j = error_of(&alphas, bias, j);
                let (low, high) = if y[i] != y[j] {
                    let gap = alphas[j] - alphas[i];
                    (gap.max(0.0), (boxes[i] + gap).min(boxes[j]))
                } else {
                    let total = alphas[i] + alphas[j];
                    ((total - boxes[i]).max(0.0), total.min(boxes[j]))
                };
                if low >= high {
                    continue;
                }
                let eta = 2.0 * gram[i][j] - gram[i][i] - gram[j][j];
                if eta >= 0.0 {
                    continue;
                }
                let alpha_j_new = (alphas[j] - y[j] * (e_i - e_j) / eta).clamp(low, high);
                let step = (alpha_j_new - alphas[j]).abs();
                if step < min_step * (alphas[j] + alpha_j_new + min_step) {
                    continue;
                }
                let alpha_i_new = alphas[i] + y[i] * y[j] * (alphas[j] - alpha_j_new);
                let delta_i = alpha_i_new - alphas[i];
                let delta_j = alpha_j_new - alphas[j];
                let b1 = bias - e_i - y[i] * delta_i * gram[i][i] - y[j] * delta_j * gram[i][j];
                let b2 = bias - e_j - y[i] * delta_i * gram[i][j] - y[j] * delta_j * gram[j][j];
                bias = if alpha_i_new > box_eps && alpha_i_new < boxes[i] - box_eps {
                    b1
                } else if alpha_j_new > box_eps && alpha_j_new < boxes[j] - box_eps {
                    b2
                } else {
                    0.5 * (b1 + b2)
                };
                alphas[i] = alpha_i_new;
                alphas[j] = alpha_j_new;
                changed += 1;
                break;
            }
        }
        if changed == 0 {
            quiet_sweeps += 1;
        } else {
            quiet_sweeps = 0;
        }
    }

    let bias = canonical_bias(&gram, y, &alphas, &boxes);
    Ok(extract_model(x, y, &alphas, bias, *kernel, config.c))
}

/// On-disk model format; carries everything needed for bit-reproducible
/// prediction plus a pointer to the normalization params it expects.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub kernel: String,
    pub gamma: Option<f64>,
    #[serde(rename = "C")]
    pub c: f64,
    pub bias: f64,
    pub support_vectors: Vec<Vec<f64>>,
    pub dual_coeffs: Vec<f64>,
    pub feature_names: Vec<String>,
    pub normalization_params_ref: Option<String>,
}

impl ModelFile {
    pub fn from_model(model: &SvmModel, feature_names: Vec<String>, params_ref: Option<String>) -> Self {
        ModelFile {
            kernel: model.kernel.name().to_string(),
            gamma: model.kernel.gamma(),
            c: model.c,
            bias: model.bias,
            support_vectors: model.support_vectors.clone(),
            dual_coeffs: model.dual_coeffs.clone(),
            feature_names,
            normalization_params_ref: params_ref,
        }
    }

    pub fn into_model(self, path: &Path) -> Result<SvmModel> {
        let kernel = match self.kernel.as_str() {
            "linear" => KernelSpec::Linear,
            "rbf" => {
                let gamma = self.gamma.ok_or_else(|| Error::BadModelFile {
                    path: path.to_path_buf(),
                    detail: "rbf kernel without gamma".into(),
                })?;
                KernelSpec::rbf(gamma)?
            }
            other => {
                return Err(Error::BadModelFile {
                    path: path.to_path_buf(),
                    detail: format!("unknown kernel `{other}`"),
                })
            }
        };
        if self.support_vectors.len() != self.dual_coeffs.len() {
            return Err(Error::BadModelFile {
                path: path.to_path_buf(),
                detail: "support vector and dual coefficient counts differ".into(),
            });
        }
        if self.support_vectors.is_empty() {
            return Err(Error::BadModelFile {
                path: path.to_path_buf(),
                detail: "model has no support vectors".into(),
            });
        }
        let indices = (0..self.support_vectors.len()).collect();
        Ok(SvmModel {
            support_vectors: self.support_vectors,
            dual_coeffs: self.dual_coeffs,
            support_indices: indices,
            bias: self.bias,
            kernel,
            c: self.c,
        })
    }

    pub fn load(path: &Path) -> Result<ModelFile> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|err| Error::BadModelFile {
            path: path.to_path_buf(),
            detail: err.to_string(),
        })
    }
}
