//! Shared test support: an independent projected-gradient solver for the
//! SVM dual, used as the ground-truth oracle against the SMO implementation.
//!
//! The oracle maximizes W(a) = sum a_i - 1/2 sum a_i a_j y_i y_j K_ij over
//! the box [0, C]^n intersected with the hyperplane sum y_i a_i = 0. Each
//! step projects exactly onto that intersection by bisecting the hyperplane
//! multiplier; nothing here shares code with the SMO path.

use coughwave::rng::DetRng;
use coughwave::svm::{kernel_eval, KernelSpec};

pub fn gram(x: &[Vec<f64>], kernel: &KernelSpec) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            g[i][j] = kernel_eval(kernel, &x[i], &x[j]).expect("dims agree");
        }
    }
    g
}

/// Dual objective value for a candidate alpha.
pub fn dual_objective(alphas: &[f64], gram: &[Vec<f64>], y: &[f64]) -> f64 {
    let n = alphas.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alphas[i] * alphas[j] * y[i] * y[j] * gram[i][j];
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

/// Exact projection of `v` onto {0 <= a <= c} intersected with {y.a = 0}.
///
/// The projection is clip(v - lambda*y, 0, c) for the lambda at which the
/// constraint holds; the constraint value is monotone in lambda, so bisect.
fn project(v: &[f64], y: &[f64], c: &[f64]) -> Vec<f64> {
    let constraint = |lambda: f64| -> f64 {
        v.iter()
            .zip(y)
            .zip(c)
            .map(|((&vi, &yi), &ci)| yi * (vi - lambda * yi).clamp(0.0, ci))
            .sum()
    };
    let bound = v
        .iter()
        .map(|a| a.abs())
        .fold(0.0f64, f64::max)
        + c.iter().cloned().fold(0.0f64, f64::max)
        + 1.0;
    let mut lo = -bound;
    let mut hi = bound;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if constraint(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    v.iter()
        .zip(y)
        .zip(c)
        .map(|((&vi, &yi), &ci)| (vi - lambda * yi).clamp(0.0, ci))
        .collect()
}

/// Projected-gradient ascent to the dual optimum. Returns the alphas.
pub fn solve_dual_projected_gradient(
    gram: &[Vec<f64>],
    y: &[f64],
    c: &[f64],
    max_iters: usize,
) -> Vec<f64> {
    let n = y.len();
    // 1/L step with L bounded by the trace of the (PSD) Hessian
    let trace: f64 = (0..n).map(|i| gram[i][i]).sum();
    let step = 1.0 / trace.max(1e-9);
    let mut alphas = vec![0.0f64; n];
    for _ in 0..max_iters {
        let mut candidate = Vec::with_capacity(n);
        for i in 0..n {
            let grad_i = 1.0
                - y[i]
                    * alphas
                        .iter()
                        .zip(y)
                        .zip(&gram[i])
                        .map(|((&a, &yy), &k)| a * yy * k)
                        .sum::<f64>();
            candidate.push(alphas[i] + step * grad_i);
        }
        let projected = project(&candidate, y, c);
        let delta = projected
            .iter()
            .zip(&alphas)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        alphas = projected;
        if delta < 1e-14 {
            break;
        }
    }
    alphas
}

/// A random small SVM instance with both classes present.
pub struct Instance {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub kernel: KernelSpec,
    pub c: f64,
}

pub fn random_instance(rng: &mut DetRng, use_rbf: bool) -> Instance {
    let n = 2 + rng.below(7); // 2..=8 points
    let d = 1 + rng.below(4); // 1..=4 dimensions
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| 2.0 * rng.standard_normal()).collect())
        .collect();
    let mut y: Vec<f64> = (0..n)
        .map(|_| if rng.next_f64() < 0.5 { 1.0 } else { -1.0 })
        .collect();
    // force both classes
    y[0] = 1.0;
    y[n - 1] = -1.0;
    let kernel = if use_rbf {
        KernelSpec::rbf(0.2 + 1.8 * rng.next_f64()).expect("positive gamma")
    } else {
        KernelSpec::Linear
    };
    let c = [0.5, 1.0, 10.0][rng.below(3)];
    Instance { x, y, kernel, c }
}
