//! Turn one segment into its 54 features and print them as a band-by-stat
//! table.
//!
//! Run with: cargo run --example extract_features

use coughwave::features::{extract_features, STAT_NAMES};
use coughwave::rng::DetRng;
use coughwave::wavelet::{dwt_decompose, Boundary, WaveletSpec};

fn main() -> coughwave::Result<()> {
    // a burst-like segment: damped oscillation with noise, 1640 ms at 8 kHz
    let mut rng = DetRng::new(11);
    let n = 13120;
    let signal: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / 8000.0;
            let burst = (-6.0 * t).exp() * (2.0 * std::f64::consts::PI * 700.0 * t).sin();
            0.5 * burst + 0.02 * rng.standard_normal()
        })
        .collect();

    let spec = WaveletSpec::daubechies(4)?;
    let decomp = dwt_decompose(&signal, &spec, 5, Boundary::Symmetric)?;
    let vector = extract_features(&decomp)?;
    println!("{} features from {} bands\n", vector.len(), decomp.bands().len());

    print!("{:<6}", "band");
    for stat in STAT_NAMES {
        print!("{stat:>11}");
    }
    println!();
    for (b, name) in decomp.band_names().iter().enumerate() {
        print!("{name:<6}");
        for s in 0..STAT_NAMES.len() {
            print!("{:>11.4}", vector.values()[b * STAT_NAMES.len() + s]);
        }
        println!();
    }
    Ok(())
}
