//! Decompose a noisy chirp with a 5-level db4 transform, inspect the band
//! structure, and verify perfect reconstruction and energy conservation.
//!
//! Run with: cargo run --example wavelet_roundtrip

use coughwave::rng::DetRng;
use coughwave::wavelet::{dwt_decompose, idwt_reconstruct, Boundary, WaveletSpec};

fn main() -> coughwave::Result<()> {
    let mut rng = DetRng::new(7);
    // quadratic chirp plus a little noise, 8192 samples
    let signal: Vec<f64> = (0..8192)
        .map(|i| {
            let t = i as f64 / 8192.0;
            0.6 * (2.0 * std::f64::consts::PI * (20.0 + 400.0 * t) * t).sin()
                + 0.05 * rng.standard_normal()
        })
        .collect();
    let energy: f64 = signal.iter().map(|v| v * v).sum();

    let spec = WaveletSpec::daubechies(4)?;
    for boundary in [Boundary::Symmetric, Boundary::Periodic] {
        let decomp = dwt_decompose(&signal, &spec, 5, boundary)?;
        println!("{boundary} boundary:");
        println!("  {:<5} {:>8} {:>14} {:>10}", "band", "length", "energy", "share");
        let mut coeff_energy = 0.0;
        for (name, band) in decomp.band_names().iter().zip(decomp.bands()) {
            let band_energy: f64 = band.iter().map(|c| c * c).sum();
            coeff_energy += band_energy;
            println!(
                "  {:<5} {:>8} {:>14.4} {:>9.2}%",
                name,
                band.len(),
                band_energy,
                100.0 * band_energy / energy
            );
        }
        let reconstructed = idwt_reconstruct(&decomp)?;
        let max_err = signal
            .iter()
            .zip(&reconstructed)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        println!("  max reconstruction error: {max_err:.3e}");
        if boundary == Boundary::Periodic {
            let rel = (energy - coeff_energy).abs() / energy;
            println!("  relative energy error:     {rel:.3e} (orthonormal transform)");
        } else {
            println!("  coefficient/sample ratio:  {:.4} (redundant extension)",
                coeff_energy / energy);
        }
        println!();
    }
    Ok(())
}
