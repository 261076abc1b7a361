//! Per-column feature scaling: z-score `(x - m)/sd` or min-max
//! `(v - min)/(max - min)`.
//!
//! Parameters are fitted on one matrix (the training rows, unless the
//! leakage-replicating paper mode fits them globally) and applied to any
//! matrix with the same columns. Constant columns map to zero under both
//! methods and are flagged so reports can surface them. Min-max outputs are
//! deliberately not clipped, so unseen data may fall outside [0, 1].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMethod {
    ZScore,
    MinMax,
    None,
}

impl NormMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            NormMethod::ZScore => "zscore",
            NormMethod::MinMax => "minmax",
            NormMethod::None => "none",
        }
    }
}

impl FromStr for NormMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zscore" => Ok(NormMethod::ZScore),
            "minmax" => Ok(NormMethod::MinMax),
            "none" => Ok(NormMethod::None),
            other => Err(Error::BadFlagValue {
                flag: "norm".into(),
                detail: format!("expected zscore, minmax or none, got `{other}`"),
            }),
        }
    }
}

impl fmt::Display for NormMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fitted state of one column.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnScale {
    ZScore { m: f64, sd: f64 },
    MinMax { min: f64, max: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColumnParams {
    pub name: String,
    #[serde(flatten)]
    pub scale: ColumnScale,
}

/// Fitted per-column scaling state; serializes to JSON for exact replay.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalizationParams {
    method: NormMethod,
    columns: Vec<ColumnParams>,
    constant_flags: Vec<bool>,
}

impl NormalizationParams {
    pub fn method(&self) -> NormMethod {
        self.method
    }

    pub fn columns(&self) -> &[ColumnParams] {
        &self.columns
    }

    pub fn constant_flags(&self) -> &[bool] {
        &self.constant_flags
    }

    /// Names of the columns flagged as constant during fitting.
    pub fn constant_column_names(&self) -> Vec<String> {
        self.columns
            .iter()
            .zip(&self.constant_flags)
            .filter(|(_, &flag)| flag)
            .map(|(col, _)| col.name.clone())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|err| Error::InvalidConfig(format!(
            "normalization params: {err}"
        )))
    }
}

/// Compute column-wise statistics over the given rows only.
pub fn fit_normalizer(method: NormMethod, matrix: &FeatureMatrix) -> Result<NormalizationParams> {
    if matrix.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if method == NormMethod::None {
        return Ok(NormalizationParams {
            method,
            columns: Vec::new(),
            constant_flags: Vec::new(),
        });
    }
    let n = matrix.n_rows() as f64;
    let mut columns = Vec::with_capacity(matrix.n_cols());
    let mut constant_flags = Vec::with_capacity(matrix.n_cols());
    for j in 0..matrix.n_cols() {
        let name = matrix.feature_names()[j].clone();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for v in matrix.column(j) {
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        // bitwise-equal extremes are the robust constant test; a rounded
        // two-pass sd can come out as a tiny nonzero for constant data
        let constant = min == max;
        let scale = match method {
            NormMethod::ZScore => {
                let m = sum / n;
                let sd = if constant || matrix.n_rows() < 2 {
                    0.0
                } else {
                    let ss: f64 = matrix.column(j).map(|v| (v - m) * (v - m)).sum();
                    (ss / (n - 1.0)).sqrt()
                };
                ColumnScale::ZScore { m, sd }
            }
            NormMethod::MinMax => ColumnScale::MinMax { min, max },
            NormMethod::None => unreachable!(),
        };
        let flagged = match scale {
            ColumnScale::ZScore { sd, .. } => sd == 0.0,
            ColumnScale::MinMax { min, max } => min == max,
        };
        constant_flags.push(flagged);
        columns.push(ColumnParams { name, scale });
    }
    Ok(NormalizationParams {
        method,
        columns,
        constant_flags,
    })
}

/// Apply fitted parameters column by column. Constant-flagged columns map to
/// zero; out-of-range min-max values are not clipped.
pub fn apply_normalizer(
    params: &NormalizationParams,
    matrix: &FeatureMatrix,
) -> Result<FeatureMatrix> {
    if params.method == NormMethod::None {
        return Ok(matrix.clone());
    }
    if params.columns.len() != matrix.n_cols() {
        return Err(Error::ColumnCountMismatch {
            fitted: params.columns.len(),
            got: matrix.n_cols(),
        });
    }
    let rows = matrix
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| {
                    if params.constant_flags[j] {
                        return 0.0;
                    }
                    match params.columns[j].scale {
                        ColumnScale::ZScore { m, sd } => (v - m) / sd,
                        ColumnScale::MinMax { min, max } => (v - min) / (max - min),
                    }
                })
                .collect()
        })
        .collect();
    Ok(matrix.replace_rows(rows))
}
