//! Write a synthetic recording, read it back, and cut it into fixed
//! windows, including the too-short case that yields a warning instead of
//! an error.
//!
//! Run with: cargo run --example wav_io

use coughwave::dataset_io::{read_wav, segment_signal, write_wav};

fn main() -> coughwave::Result<()> {
    let dir = std::env::temp_dir().join("coughwave_wav_example");
    std::fs::create_dir_all(&dir).expect("create temp dir");
    let path = dir.join("tone.wav");

    // 3.9 s of a 440 Hz tone at 8 kHz
    let rate = 8000u32;
    let samples: Vec<f64> = (0..31_200)
        .map(|i| 0.3 * (2.0 * std::f64::consts::PI * 440.0 * i as f64 / rate as f64).sin())
        .collect();
    write_wav(&path, &samples, rate)?;

    let (decoded, decoded_rate) = read_wav(&path)?;
    println!(
        "wrote {} samples at {rate} Hz, read back {} at {decoded_rate} Hz",
        samples.len(),
        decoded.len()
    );
    let max_err = samples
        .iter()
        .zip(&decoded)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("max quantization error: {max_err:.3e} (16-bit grid is 1/32768 = 3.05e-5)");

    let (windows, warning) = segment_signal(&decoded, decoded_rate, 1640)?;
    println!(
        "1640 ms windows: {} segments of {} samples, remainder dropped",
        windows.len(),
        windows.first().map_or(0, Vec::len)
    );
    assert!(warning.is_none());

    // a clip shorter than one window produces a warning, not an error
    let (short_windows, warning) = segment_signal(&decoded[..4000], decoded_rate, 1640)?;
    println!(
        "short clip: {} segments, warning: {}",
        short_windows.len(),
        warning.map(|w| w.to_string()).unwrap_or_default()
    );
    Ok(())
}
