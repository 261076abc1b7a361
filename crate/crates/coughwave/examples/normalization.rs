//! Fit z-score and min-max scalers, check their self-fit identities, and
//! show why fitting on training rows only matters.
//!
//! Run with: cargo run --example normalization

use coughwave::dataset_io::{Label, SegmentSource};
use coughwave::features::{FeatureMatrix, FeatureVector};
use coughwave::normalize::{apply_normalizer, fit_normalizer, NormMethod};
use coughwave::rng::DetRng;

fn toy_matrix(rng: &mut DetRng, rows: usize, shift: f64) -> FeatureMatrix {
    let mut matrix = FeatureMatrix::new(vec!["energy".into(), "entropy".into()]);
    for i in 0..rows {
        let values = vec![
            50.0 + 12.0 * rng.standard_normal() + shift,
            3.0 + 0.4 * rng.standard_normal(),
        ];
        matrix
            .push(
                FeatureVector::from_values(values),
                Label::Positive,
                SegmentSource {
                    subject_id: format!("s{i}"),
                    segment_index: i,
                },
            )
            .unwrap();
    }
    matrix
}

fn column_stats(matrix: &FeatureMatrix, j: usize) -> (f64, f64, f64, f64) {
    let vals: Vec<f64> = matrix.column(j).collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let sd = (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (mean, sd, min, max)
}

fn main() -> coughwave::Result<()> {
    let mut rng = DetRng::new(3);
    let train = toy_matrix(&mut rng, 80, 0.0);
    // test rows drawn from a shifted distribution, as unseen data usually is
    let test = toy_matrix(&mut rng, 20, 25.0);

    for method in [NormMethod::ZScore, NormMethod::MinMax] {
        let params = fit_normalizer(method, &train)?;
        let train_scaled = apply_normalizer(&params, &train)?;
        let test_scaled = apply_normalizer(&params, &test)?;
        println!("{method}:");
        let (mean, sd, min, max) = column_stats(&train_scaled, 0);
        println!(
            "  train col 0 after self-fit: mean {mean:+.2e}, sd {sd:.12}, range [{min:.3}, {max:.3}]"
        );
        let (_, _, tmin, tmax) = column_stats(&test_scaled, 0);
        println!(
            "  test col 0 with train params: range [{tmin:.3}, {tmax:.3}]  <- shifted data lands outside the fitted range"
        );
        println!("  params JSON:\n{}", indent(&params.to_json()));
    }
    println!(
        "Fitting on all rows before splitting (the --paper-mode switch) leaks\n\
         test statistics into training; the default fits per training fold."
    );
    Ok(())
}

fn indent(text: &str) -> String {
    text.lines()
        .map(|l| format!("    {l}"))
        .collect::<Vec<_>>()
        .join("\n")
}
