//! Per-band statistics and the feature matrix fed to the classifier.
//!
//! Each wavelet band is reduced to nine statistics, in fixed order: mean,
//! mean absolute value, sample standard deviation, RMS, energy, zero-crossing
//! count, skewness, excess kurtosis, and the Shannon entropy of the
//! normalized squared coefficients. Six bands from the default 5-level
//! decomposition give the 54-dimensional feature vector. The statistic set is
//! echoed into every report so results stay self-describing.

use std::io::{self, Write};

use serde::Serialize;

use crate::dataset_io::{Label, SegmentSource};
use crate::error::{Error, Result};
use crate::wavelet::{band_names, WaveletDecomposition};

/// Statistics computed per band, in output order.
pub const BAND_STAT_COUNT: usize = 9;

pub const STAT_NAMES: [&str; BAND_STAT_COUNT] = [
    "mean", "mav", "sd", "rms", "energy", "zc", "skew", "kurt", "entropy",
];

/// Name + definition pairs echoed into report artifacts.
#[derive(Clone, Debug, Serialize)]
pub struct StatDefinition {
    pub name: &'static str,
    pub definition: &'static str,
}

pub fn stat_definitions() -> Vec<StatDefinition> {
    vec![
        StatDefinition { name: "mean", definition: "arithmetic mean of the coefficients" },
        StatDefinition { name: "mav", definition: "mean absolute value" },
        StatDefinition { name: "sd", definition: "sample standard deviation (n-1 denominator, 0 for a single coefficient)" },
        StatDefinition { name: "rms", definition: "root mean square" },
        StatDefinition { name: "energy", definition: "sum of squared coefficients" },
        StatDefinition { name: "zc", definition: "strict sign changes, zeros ignored" },
        StatDefinition { name: "skew", definition: "population skewness m3/m2^1.5, 0 when variance < 1e-24" },
        StatDefinition { name: "kurt", definition: "population excess kurtosis m4/m2^2 - 3, 0 when variance < 1e-24" },
        StatDefinition { name: "entropy", definition: "Shannon entropy -sum(p ln p) of p_i = c_i^2/energy, 0 when energy is 0" },
    ]
}

const MOMENT_GUARD: f64 = 1e-24;

/// The nine statistics of one coefficient band, in [`STAT_NAMES`] order.
pub fn band_features(coeffs: &[f64]) -> Result<[f64; BAND_STAT_COUNT]> {
    if coeffs.is_empty() {
        return Err(Error::EmptyBand);
    }
    let n = coeffs.len() as f64;
    let mean = coeffs.iter().sum::<f64>() / n;
    let mav = coeffs.iter().map(|c| c.abs()).sum::<f64>() / n;
    let energy: f64 = coeffs.iter().map(|c| c * c).sum();
    let rms = (energy / n).sqrt();

    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &c in coeffs {
        let d = c - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let sd = if coeffs.len() > 1 {
        (m2 / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let (skew, kurt) = if m2 < MOMENT_GUARD {
        (0.0, 0.0)
    } else {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    };

    let mut zc = 0u32;
    let mut last_sign = 0i8;
    for &c in coeffs {
        let sign = if c > 0.0 {
            1
        } else if c < 0.0 {
            -1
        } else {
            0
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                zc += 1;
            }
            last_sign = sign;
        }
    }

    let entropy = if energy == 0.0 {
        0.0
    } else {
        -coeffs
            .iter()
            .map(|c| c * c / energy)
            .filter(|&p| p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
    };

    Ok([mean, mav, sd, rms, energy, zc as f64, skew, kurt, entropy])
}

/// Ordered per-segment feature values; `feature_names` gives the aligned
/// column identifiers.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn from_values(values: Vec<f64>) -> Self {
        FeatureVector { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Column names `<band>_<stat>` for a `levels`-deep decomposition; the
/// default 5 levels yield the 54 names `D1_mean .. A5_entropy`.
pub fn feature_names(levels: usize) -> Vec<String> {
    let mut names = Vec::with_capacity((levels + 1) * BAND_STAT_COUNT);
    for band in band_names(levels) {
        for stat in STAT_NAMES {
            names.push(format!("{band}_{stat}"));
        }
    }
    names
}

/// Concatenate [`band_features`] over the bands in `[D1..Dn, An]` order.
pub fn extract_features(decomp: &WaveletDecomposition) -> Result<FeatureVector> {
    let mut values = Vec::with_capacity(decomp.bands().len() * BAND_STAT_COUNT);
    for band in decomp.bands() {
        values.extend_from_slice(&band_features(band)?);
    }
    Ok(FeatureVector { values })
}

/// Feature rows with aligned labels and provenance.
#[derive(Clone, Debug)]
pub struct FeatureMatrix {
    feature_names: Vec<String>,
    rows: Vec<Vec<f64>>,
    labels: Vec<Label>,
    sources: Vec<SegmentSource>,
}

impl FeatureMatrix {
    pub fn new(feature_names: Vec<String>) -> Self {
        FeatureMatrix {
            feature_names,
            rows: Vec::new(),
            labels: Vec::new(),
            sources: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        features: FeatureVector,
        label: Label,
        source: SegmentSource,
    ) -> Result<()> {
        if features.len() != self.feature_names.len() {
            return Err(Error::RowWidthMismatch {
                expected: self.feature_names.len(),
                got: features.len(),
            });
        }
        self.rows.push(features.into_values());
        self.labels.push(label);
        self.sources.push(source);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn sources(&self) -> &[SegmentSource] {
        &self.sources
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |row| row[j])
    }

    /// `(positive, negative)` row counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let positive = self
            .labels
            .iter()
            .filter(|&&l| l == Label::Positive)
            .count();
        (positive, self.labels.len() - positive)
    }

    /// Matrix with the same columns but only the selected rows, in the
    /// order given.
    pub fn select(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            sources: indices.iter().map(|&i| self.sources[i].clone()).collect(),
        }
    }

    pub(crate) fn replace_rows(&self, rows: Vec<Vec<f64>>) -> FeatureMatrix {
        FeatureMatrix {
            feature_names: self.feature_names.clone(),
            rows,
            labels: self.labels.clone(),
            sources: self.sources.clone(),
        }
    }

    /// CSV export: feature columns by name, then `label,subject_id,segment_index`.
    /// Values carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "{},label,subject_id,segment_index",
            self.feature_names.join(",")
        )?;
        for ((row, label), source) in self.rows.iter().zip(&self.labels).zip(&self.sources) {
            for value in row {
                write!(out, "{value:.16e},")?;
            }
            writeln!(
                out,
                "{},{},{}",
                label, source.subject_id, source.segment_index
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DetRng;
    use crate::wavelet::{dwt_decompose, Boundary, WaveletSpec};
    use proptest::prelude::*;

    fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
        assert!(
            (got - want).abs() <= tol,
            "{what}: got {got}, want {want}"
        );
    }

    #[test]
    fn constant_band_statistics() {
        // hand computation; uniform p_i = 0.25 gives entropy ln 4
        let f = band_features(&[5.0, 5.0, 5.0, 5.0]).unwrap();
        assert_close(f[0], 5.0, 0.0, "mean");
        assert_close(f[1], 5.0, 0.0, "mav");
        assert_close(f[2], 0.0, 0.0, "sd");
        assert_close(f[3], 5.0, 1e-12, "rms");
        assert_close(f[4], 100.0, 1e-12, "energy");
        assert_close(f[5], 0.0, 0.0, "zc");
        assert_close(f[6], 0.0, 0.0, "skew");
        assert_close(f[7], 0.0, 0.0, "kurt");
        assert_close(f[8], 4.0f64.ln(), 1e-12, "entropy");
    }

    #[test]
    fn zero_band_is_all_zero() {
        let f = band_features(&[0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(f.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn alternating_band_statistics() {
        // sd = sqrt(4/3) with the n-1 denominator; three strict sign changes
        let f = band_features(&[1.0, -1.0, 1.0, -1.0]).unwrap();
        assert_close(f[0], 0.0, 1e-15, "mean");
        assert_close(f[1], 1.0, 0.0, "mav");
        assert_close(f[2], (4.0f64 / 3.0).sqrt(), 1e-12, "sd");
        assert_close(f[3], 1.0, 1e-12, "rms");
        assert_close(f[4], 4.0, 0.0, "energy");
        assert_close(f[5], 3.0, 0.0, "zc");
        assert_close(f[6], 0.0, 1e-15, "skew");
        assert_close(f[8], 4.0f64.ln(), 1e-12, "entropy");
    }

    #[test]
    fn zero_crossings_ignore_zeros() {
        let f = band_features(&[1.0, 0.0, 2.0, -1.0, 0.0, -2.0, 3.0]).unwrap();
        assert_eq!(f[5], 2.0);
    }

    #[test]
    fn empty_band_is_an_error() {
        assert!(matches!(band_features(&[]), Err(Error::EmptyBand)));
    }

    #[test]
    fn five_level_vector_has_54_features() {
        let spec = WaveletSpec::daubechies(4).unwrap();
        let mut rng = DetRng::new(0);
        let signal: Vec<f64> = (0..2048).map(|_| rng.next_f64() - 0.5).collect();
        let decomp = dwt_decompose(&signal, &spec, 5, Boundary::Symmetric).unwrap();
        let vector = extract_features(&decomp).unwrap();
        assert_eq!(vector.len(), 54);
        let names = feature_names(5);
        assert_eq!(names.len(), 54);
        assert_eq!(names[0], "D1_mean");
        assert_eq!(names[53], "A5_entropy");
        assert_eq!(names[9], "D2_mean");
    }

    #[test]
    fn zero_signal_gives_zero_vector() {
        let spec = WaveletSpec::daubechies(4).unwrap();
        let decomp = dwt_decompose(&vec![0.0; 512], &spec, 5, Boundary::Symmetric).unwrap();
        let vector = extract_features(&decomp).unwrap();
        assert!(vector.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn doubling_the_signal_scales_features_predictably() {
        // energy x4; mean/mav/sd/rms x2; zc, skew, kurt, entropy unchanged
        let spec = WaveletSpec::daubechies(4).unwrap();
        let mut rng = DetRng::new(7);
        let signal: Vec<f64> = (0..1024).map(|_| rng.standard_normal()).collect();
        let doubled: Vec<f64> = signal.iter().map(|v| 2.0 * v).collect();
        let base =
            extract_features(&dwt_decompose(&signal, &spec, 5, Boundary::Symmetric).unwrap())
                .unwrap();
        let scaled =
            extract_features(&dwt_decompose(&doubled, &spec, 5, Boundary::Symmetric).unwrap())
                .unwrap();
        for (i, (b, s)) in base.values().iter().zip(scaled.values()).enumerate() {
            let stat = STAT_NAMES[i % BAND_STAT_COUNT];
            let (factor, tol) = match stat {
                "energy" => (4.0, 1e-9),
                "mean" | "mav" | "sd" | "rms" => (2.0, 1e-9),
                _ => (1.0, 1e-9),
            };
            let expect = b * factor;
            let scale = expect.abs().max(1.0);
            assert!(
                (s - expect).abs() / scale <= tol,
                "{stat}: base {b}, scaled {s}"
            );
        }
    }

    #[test]
    fn extraction_is_bit_deterministic() {
        let spec = WaveletSpec::daubechies(6).unwrap();
        let mut rng = DetRng::new(3);
        let signal: Vec<f64> = (0..512).map(|_| rng.standard_normal()).collect();
        let a =
            extract_features(&dwt_decompose(&signal, &spec, 4, Boundary::Periodic).unwrap())
                .unwrap();
        let b =
            extract_features(&dwt_decompose(&signal, &spec, 4, Boundary::Periodic).unwrap())
                .unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn permuting_segments_permutes_rows_identically() {
        let spec = WaveletSpec::daubechies(4).unwrap();
        let mut rng = DetRng::new(15);
        let segments: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..512).map(|_| rng.standard_normal()).collect())
            .collect();
        let featurize = |signal: &[f64]| {
            extract_features(&dwt_decompose(signal, &spec, 5, Boundary::Symmetric).unwrap())
                .unwrap()
        };
        let forward: Vec<FeatureVector> = segments.iter().map(|s| featurize(s)).collect();
        let reversed: Vec<FeatureVector> =
            segments.iter().rev().map(|s| featurize(s)).collect();
        for (i, vector) in forward.iter().enumerate() {
            assert_eq!(vector.values(), reversed[segments.len() - 1 - i].values());
        }
    }

    #[test]
    fn matrix_rejects_wrong_width_rows() {
        let mut matrix = FeatureMatrix::new(feature_names(5));
        let short = FeatureVector { values: vec![0.0; 9] };
        let err = matrix
            .push(
                short,
                Label::Positive,
                SegmentSource {
                    subject_id: "s".into(),
                    segment_index: 0,
                },
            )
            .unwrap_err();
        assert!(matches!(
            err,
            Error::RowWidthMismatch {
                expected: 54,
                got: 9
            }
        ));
    }

    #[test]
    fn csv_layout() {
        let mut matrix = FeatureMatrix::new(vec!["a".into(), "b".into()]);
        matrix
            .push(
                FeatureVector {
                    values: vec![1.0, -0.5],
                },
                Label::Negative,
                SegmentSource {
                    subject_id: "s9".into(),
                    segment_index: 4,
                },
            )
            .unwrap();
        let mut buf = Vec::new();
        matrix.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("a,b,label,subject_id,segment_index"));
        let row = lines.next().unwrap();
        assert!(row.ends_with(",negative,s9,4"));
        assert!(row.starts_with("1.0000000000000000e0,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn entropy_is_bounded_by_log_band_length(values in proptest::collection::vec(-100.0f64..100.0, 1..200)) {
            let f = band_features(&values).unwrap();
            prop_assert!(f[8] >= 0.0);
            prop_assert!(f[8] <= (values.len() as f64).ln() + 1e-9);
        }

        #[test]
        fn sign_flip_symmetry(values in proptest::collection::vec(-10.0f64..10.0, 2..100)) {
            let flipped: Vec<f64> = values.iter().map(|v| -v).collect();
            let a = band_features(&values).unwrap();
            let b = band_features(&flipped).unwrap();
            // mean and skew negate; everything else is invariant
            prop_assert!((a[0] + b[0]).abs() <= 1e-12);
            prop_assert!((a[6] + b[6]).abs() <= 1e-9 * a[6].abs().max(1.0));
            for idx in [1usize, 2, 3, 4, 5, 7, 8] {
                let scale = a[idx].abs().max(1.0);
                prop_assert!((a[idx] - b[idx]).abs() / scale <= 1e-12, "stat {}", STAT_NAMES[idx]);
            }
        }
    }
}
