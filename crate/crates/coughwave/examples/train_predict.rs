//! Train the SMO solver on two tiny classics: the 1-D two-point problem
//! with a known closed-form optimum, and XOR under an RBF kernel.
//!
//! Run with: cargo run --example train_predict

use coughwave::svm::{train_smo, KernelSpec, TrainConfig};

fn main() -> coughwave::Result<()> {
    // two points at -1 and +1: the dual optimum is alpha = 0.5 for both,
    // bias 0, decision f(x) = x
    let x = vec![vec![-1.0], vec![1.0]];
    let y = vec![-1.0, 1.0];
    let config = TrainConfig {
        c: 10.0,
        tolerance: 1e-6,
        seed: 1,
        ..TrainConfig::default()
    };
    let model = train_smo(&x, &y, &KernelSpec::Linear, &config)?;
    println!("two-point problem (closed form: alpha = 0.5, b = 0):");
    println!("  dual coefficients: {:?}", model.dual_coeffs());
    println!("  bias: {:+.2e}", model.bias());
    for probe in [-2.0, 0.0, 2.0] {
        let (label, decision) = model.predict(&[probe])?;
        println!("  f({probe:+}) = {decision:+.6} -> {label}");
    }

    // XOR: not linearly separable, trivial for an RBF kernel
    let x = vec![
        vec![0.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
    ];
    let y = vec![-1.0, -1.0, 1.0, 1.0];
    let kernel = KernelSpec::rbf(1.0)?;
    let model = train_smo(&x, &y, &kernel, &config)?;
    println!("\nxor with {kernel}:");
    let mut correct = 0;
    for (row, want) in x.iter().zip(&y) {
        let (label, decision) = model.predict(row)?;
        if label.to_sign() == *want {
            correct += 1;
        }
        println!("  {row:?} -> {label} (decision {decision:+.4})");
    }
    println!("  training accuracy: {correct}/4");
    println!("  support vectors: {}", model.support_vectors().len());
    Ok(())
}
