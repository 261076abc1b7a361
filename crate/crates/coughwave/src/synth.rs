//! Synthetic two-class cough-like datasets for demos and end-to-end tests.
//!
//! Each segment is built by filling selected wavelet bands with noise and
//! inverting the transform, so the two classes concentrate their energy in
//! disjoint frequency bands: the positive class lives in the fine detail
//! bands (D1, D2), the negative class in the coarse ones (D4, D5, A5). The
//! result is trivially separable by band-energy features, which is exactly
//! what a pipeline shakedown needs.

use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset_io::{window_length, write_wav, Label, MANIFEST_HEADER};
use crate::error::{Error, Result};
use crate::rng::DetRng;
use crate::wavelet::{coeff_len, idwt_reconstruct, Boundary, WaveletDecomposition, WaveletSpec};

/// Shape of a generated dataset.
#[derive(Clone, Copy, Debug)]
pub struct SynthSpec {
    pub per_class: usize,
    pub sample_rate: u32,
    pub duration_ms: u32,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            per_class: 60,
            sample_rate: 8000,
            duration_ms: 1640,
            seed: 42,
        }
    }
}

const LEVELS: usize = 5;
const SUBJECTS_PER_CLASS: usize = 8;
/// Leakage of noise into the cold bands, so features stay non-degenerate.
const COLD_BAND_SCALE: f64 = 0.02;

fn band_lengths(window: usize, filter_len: usize) -> Vec<usize> {
    let mut lengths = Vec::with_capacity(LEVELS + 1);
    let mut len = window;
    for _ in 0..LEVELS {
        len = coeff_len(len, filter_len, Boundary::Periodic);
        lengths.push(len);
    }
    lengths.push(len); // approximation matches the deepest detail band
    lengths
}

fn synth_segment(
    rng: &mut DetRng,
    spec: &WaveletSpec,
    window: usize,
    label: Label,
) -> Result<Vec<f64>> {
    let lengths = band_lengths(window, spec.filter_len());
    let hot = |band: usize| match label {
        // bands: 0..4 are D1..D5, 5 is A5
        Label::Positive => band <= 1,
        Label::Negative => band >= 3,
    };
    let bands: Vec<Vec<f64>> = lengths
        .iter()
        .enumerate()
        .map(|(band, &len)| {
            let scale = if hot(band) { 1.0 } else { COLD_BAND_SCALE };
            (0..len).map(|_| scale * rng.standard_normal()).collect()
        })
        .collect();
    let decomp =
        WaveletDecomposition::from_bands(bands, spec.clone(), Boundary::Periodic, window)?;
    let mut signal = idwt_reconstruct(&decomp)?;
    let peak = signal.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        // vary loudness a little per segment, staying clear of clipping
        let target = 0.35 * (0.8 + 0.4 * rng.next_f64());
        let gain = target / peak;
        signal.iter_mut().for_each(|v| *v *= gain);
    }
    Ok(signal)
}

/// Write `per_class` WAV segments per class plus a manifest into `dir`;
/// returns the manifest path.
pub fn generate_dataset(dir: &Path, spec: &SynthSpec) -> Result<PathBuf> {
    if spec.per_class == 0 {
        return Err(Error::InvalidConfig(
            "synthetic dataset needs at least one segment per class".into(),
        ));
    }
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let wavelet = WaveletSpec::daubechies(4)?;
    let window = window_length(spec.sample_rate, spec.duration_ms);
    if window < 1 << LEVELS {
        return Err(Error::InvalidConfig(format!(
            "window of {window} samples is too short for {LEVELS}-level synthesis"
        )));
    }
    let mut rng = DetRng::new(spec.seed);
    let mut manifest = String::from(MANIFEST_HEADER);
    manifest.push('\n');
    for (label, prefix) in [(Label::Positive, "pos"), (Label::Negative, "neg")] {
        for i in 0..spec.per_class {
            let samples = synth_segment(&mut rng, &wavelet, window, label)?;
            let file_name = format!("{prefix}_{i:03}.wav");
            write_wav(&dir.join(&file_name), &samples, spec.sample_rate)?;
            manifest.push_str(&format!(
                "{file_name},{},{prefix}_subj_{}\n",
                label,
                i % SUBJECTS_PER_CLASS
            ));
        }
    }
    let manifest_path = dir.join("manifest.csv");
    fs::write(&manifest_path, manifest).map_err(|source| Error::Io {
        path: manifest_path.clone(),
        source,
    })?;
    Ok(manifest_path)
}
