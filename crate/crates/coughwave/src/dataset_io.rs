//! Dataset loading: the manifest catalog, WAV decoding, and segmentation.
//!
//! A dataset is described by a sidecar CSV manifest with the header
//! `path,label,subject_id`. Audio must be RIFF/WAVE, PCM format code 1,
//! 16 bits per sample, one channel; anything else is rejected rather than
//! silently converted. Recordings are cut into consecutive non-overlapping
//! windows of a fixed duration and the trailing remainder is dropped.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Expected manifest header row.
pub const MANIFEST_HEADER: &str = "path,label,subject_id";

/// Class label with COVID19(+) as the positive class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
        }
    }

    /// Signed value used by the classifier: positive maps to +1.
    pub fn to_sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }
}

impl FromStr for Label {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.to_ascii_lowercase().as_str() {
            "positive" => Ok(Label::Positive),
            "negative" => Ok(Label::Negative),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One manifest row.
#[derive(Clone, Debug)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: Label,
    pub subject_id: String,
}

/// Ordered collection of manifest rows.
#[derive(Clone, Debug)]
pub struct DatasetManifest {
    entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Self {
        DatasetManifest { entries }
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(positive, negative)` row counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let positive = self
            .entries
            .iter()
            .filter(|e| e.label == Label::Positive)
            .count();
        (positive, self.entries.len() - positive)
    }
}

/// Parse a manifest CSV, preserving row order.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(err) if err.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::ManifestNotFound(path.to_path_buf()))
        }
        Err(err) => {
            return Err(Error::Io {
                path: path.to_path_buf(),
                source: err,
            })
        }
    };
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line.trim_start_matches('\u{feff}').trim(),
        None => return Err(Error::ManifestHeader(String::new())),
    };
    if header != MANIFEST_HEADER {
        return Err(Error::ManifestHeader(header.to_string()));
    }
    let mut entries = Vec::new();
    let mut seen_paths: Vec<String> = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::ManifestFieldCount {
                line: line_no,
                got: fields.len(),
            });
        }
        if fields[0].is_empty() {
            return Err(Error::EmptyManifestPath { line: line_no });
        }
        let label = Label::from_str(fields[1]).map_err(|()| Error::UnknownLabel {
            line: line_no,
            token: fields[1].to_string(),
        })?;
        if seen_paths.iter().any(|p| p == fields[0]) {
            return Err(Error::DuplicateManifestPath {
                line: line_no,
                path: fields[0].to_string(),
            });
        }
        seen_paths.push(fields[0].to_string());
        entries.push(ManifestEntry {
            path: PathBuf::from(fields[0]),
            label,
            subject_id: fields[2].to_string(),
        });
    }
    if entries.is_empty() {
        return Err(Error::EmptyManifest);
    }
    Ok(DatasetManifest::new(entries))
}

fn read_u16_le(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn read_u32_le(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

/// Decode a 16-bit mono PCM WAV file into samples scaled by 1/32768.
pub fn read_wav(path: &Path) -> Result<(Vec<f64>, u32)> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let not_wave = || Error::NotWave {
        path: path.to_path_buf(),
    };
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(not_wave());
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None; // (code, channels, rate, bits)
    let mut data: Option<(usize, usize)> = None; // (offset, declared size)
    let mut cursor = 12usize;
    while cursor + 8 <= bytes.len() {
        let chunk_id = &bytes[cursor..cursor + 4];
        let declared = read_u32_le(&bytes, cursor + 4) as usize;
        let body = cursor + 8;
        if chunk_id == b"fmt " {
            if body + 16 > bytes.len() || declared < 16 {
                return Err(Error::Truncated {
                    path: path.to_path_buf(),
                    chunk: "fmt".into(),
                });
            }
            fmt = Some((
                read_u16_le(&bytes, body),
                read_u16_le(&bytes, body + 2),
                read_u32_le(&bytes, body + 4),
                read_u16_le(&bytes, body + 14),
            ));
        } else if chunk_id == b"data" {
            if body + declared > bytes.len() {
                return Err(Error::Truncated {
                    path: path.to_path_buf(),
                    chunk: "data".into(),
                });
            }
            data = Some((body, declared));
        }
        // chunks are word aligned
        cursor = body + declared + (declared % 2);
    }

    let (code, channels, rate, bits) = fmt.ok_or_else(|| Error::MissingChunk {
        path: path.to_path_buf(),
        chunk: "fmt".into(),
    })?;
    let (data_at, data_len) = data.ok_or_else(|| Error::MissingChunk {
        path: path.to_path_buf(),
        chunk: "data".into(),
    })?;
    if code != 1 {
        return Err(Error::NonPcm {
            path: path.to_path_buf(),
            code,
        });
    }
    if channels != 1 {
        return Err(Error::NotMono {
            path: path.to_path_buf(),
            channels,
        });
    }
    if bits != 16 {
        return Err(Error::UnsupportedBitDepth {
            path: path.to_path_buf(),
            bits,
        });
    }
    if rate == 0 {
        return Err(Error::BadSampleRate {
            path: path.to_path_buf(),
            rate,
        });
    }
    if data_len % 2 != 0 {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            chunk: "data".into(),
        });
    }
    if data_len == 0 {
        return Err(Error::NoSamples {
            path: path.to_path_buf(),
        });
    }
    let samples = bytes[data_at..data_at + data_len]
        .chunks_exact(2)
        .map(|pair| i16::from_le_bytes([pair[0], pair[1]]) as f64 / 32768.0)
        .collect();
    Ok((samples, rate))
}

/// Write samples as a 16-bit mono PCM WAV file.
///
/// Values are scaled by 32768 and rounded to the nearest representable
/// sample, clamping at full scale; inputs already on the 16-bit grid
/// round-trip losslessly through [`read_wav`].
pub fn write_wav(path: &Path, samples: &[f64], sample_rate: u32) -> Result<()> {
    let data_len = samples.len() * 2;
    let mut bytes = Vec::with_capacity(44 + data_len);
    bytes.extend_from_slice(b"RIFF");
    bytes.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    bytes.extend_from_slice(b"WAVE");
    bytes.extend_from_slice(b"fmt ");
    bytes.extend_from_slice(&16u32.to_le_bytes());
    bytes.extend_from_slice(&1u16.to_le_bytes()); // PCM
    bytes.extend_from_slice(&1u16.to_le_bytes()); // mono
    bytes.extend_from_slice(&sample_rate.to_le_bytes());
    bytes.extend_from_slice(&(sample_rate * 2).to_le_bytes()); // byte rate
    bytes.extend_from_slice(&2u16.to_le_bytes()); // block align
    bytes.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    bytes.extend_from_slice(b"data");
    bytes.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &sample in samples {
        let scaled = (sample * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        bytes.extend_from_slice(&scaled.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Samples in one fixed-duration window: `round(rate * ms / 1000)`.
pub fn window_length(sample_rate: u32, duration_ms: u32) -> usize {
    ((sample_rate as u64 * duration_ms as u64 + 500) / 1000) as usize
}

/// Emitted instead of an error when a recording is shorter than one window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegmentationWarning {
    pub signal_len: usize,
    pub window_len: usize,
}

impl fmt::Display for SegmentationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "signal of {} samples is shorter than one {}-sample window; no segments produced",
            self.signal_len, self.window_len
        )
    }
}

/// Cut a signal into consecutive non-overlapping windows, dropping the
/// remainder. A signal shorter than one window yields zero segments plus a
/// warning record.
pub fn segment_signal(
    samples: &[f64],
    sample_rate: u32,
    duration_ms: u32,
) -> Result<(Vec<Vec<f64>>, Option<SegmentationWarning>)> {
    if duration_ms == 0 {
        return Err(Error::BadSegmentation("duration must be positive".into()));
    }
    if samples.is_empty() {
        return Err(Error::BadSegmentation("signal is empty".into()));
    }
    let window = window_length(sample_rate, duration_ms);
    if window == 0 {
        return Err(Error::BadSegmentation(format!(
            "window of {duration_ms} ms at {sample_rate} Hz rounds to zero samples"
        )));
    }
    if samples.len() < window {
        return Ok((
            Vec::new(),
            Some(SegmentationWarning {
                signal_len: samples.len(),
                window_len: window,
            }),
        ));
    }
    let segments = samples
        .chunks_exact(window)
        .map(|chunk| chunk.to_vec())
        .collect();
    Ok((segments, None))
}

/// Provenance of a segment: which subject, and which window of that subject.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SegmentSource {
    pub subject_id: String,
    pub segment_index: usize,
}

impl fmt::Display for SegmentSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.subject_id, self.segment_index)
    }
}

/// A fixed-duration labeled sample window.
#[derive(Clone, Debug)]
pub struct AudioSegment {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    pub label: Label,
    pub source: SegmentSource,
}

/// All segments of a dataset, plus anything worth telling the user.
#[derive(Clone, Debug)]
pub struct LoadedDataset {
    pub segments: Vec<AudioSegment>,
    pub sample_rate: u32,
    pub warnings: Vec<String>,
}

/// Read every manifest entry, enforce one sample rate across the dataset,
/// and segment each recording. Relative manifest paths resolve against
/// `base_dir`.
pub fn load_dataset(
    manifest: &DatasetManifest,
    base_dir: &Path,
    duration_ms: u32,
) -> Result<LoadedDataset> {
    let mut segments = Vec::new();
    let mut warnings = Vec::new();
    let mut dataset_rate: Option<u32> = None;
    // segment indices continue across files of the same subject
    let mut per_subject: Vec<(String, usize)> = Vec::new();
    for entry in manifest.entries() {
        let path = if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            base_dir.join(&entry.path)
        };
        let (samples, rate) = read_wav(&path)?;
        match dataset_rate {
            None => dataset_rate = Some(rate),
            Some(first) if first != rate => {
                return Err(Error::MixedSampleRates {
                    first,
                    other: rate,
                    path,
                })
            }
            Some(_) => {}
        }
        let (windows, warning) = segment_signal(&samples, rate, duration_ms)?;
        if let Some(w) = warning {
            warnings.push(format!("{}: {w}", path.display()));
        }
        let counter = match per_subject
            .iter_mut()
            .find(|(id, _)| id == &entry.subject_id)
        {
            Some((_, count)) => count,
            None => {
                per_subject.push((entry.subject_id.clone(), 0));
                &mut per_subject.last_mut().unwrap().1
            }
        };
        for window in windows {
            segments.push(AudioSegment {
                samples: window,
                sample_rate: rate,
                label: entry.label,
                source: SegmentSource {
                    subject_id: entry.subject_id.clone(),
                    segment_index: *counter,
                },
            });
            *counter += 1;
        }
    }
    let sample_rate = dataset_rate.expect("manifest is never empty");
    Ok(LoadedDataset {
        segments,
        sample_rate,
        warnings,
    })
}

/// Z-score a raw signal in place: subtract its mean, divide by its sample
/// standard deviation. Constant signals become all zeros.
pub fn zscore_signal(samples: &mut [f64]) {
    let n = samples.len();
    if n == 0 {
        return;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    if sd == 0.0 {
        samples.iter_mut().for_each(|s| *s = 0.0);
    } else {
        samples.iter_mut().for_each(|s| *s = (*s - mean) / sd);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_manifest(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("manifest.csv");
        let mut file = fs::File::create(&path).unwrap();
        file.write_all(body.as_bytes()).unwrap();
        path
    }

    #[test]
    fn manifest_two_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_manifest(
            dir.path(),
            "path,label,subject_id\na.wav,positive,s1\nb.wav,negative,s2\n",
        );
        let manifest = load_manifest(&path).unwrap();
        assert_eq!(manifest.len(), 2);
        assert_eq!(manifest.class_counts(), (1, 1));
        assert_eq!(manifest.entries()[0].subject_id, "s1");
    }

    #[test]
    fn manifest_is_order_preserving_and_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let body = "path,label,subject_id\nc.wav,negative,s3\na.wav,positive,s1\nb.wav,negative,s2\n";
        let path = write_manifest(dir.path(), body);
        let first = load_manifest(&path).unwrap();
        let second = load_manifest(&path).unwrap();
        let order: Vec<&str> = first
            .entries()
            .iter()
            .map(|e| e.path.to_str().unwrap())
            .collect();
        assert_eq!(order, vec!["c.wav", "a.wav", "b.wav"]);
        for (a, b) in first.entries().iter().zip(second.entries()) {
            assert_eq!(a.path, b.path);
            assert_eq!(a.label, b.label);
        }
    }

    #[test]
    fn manifest_unknown_label() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_manifest(dir.path(), "path,label,subject_id\na.wav,maybe,s1\n");
        match load_manifest(&path).unwrap_err() {
            Error::UnknownLabel { token, .. } => assert_eq!(token, "maybe"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn manifest_labels_are_case_insensitive() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_manifest(
            dir.path(),
            "path,label,subject_id\na.wav,Positive,s1\nb.wav,NEGATIVE,s2\n",
        );
        let manifest = load_manifest(&path).unwrap();
        assert_eq!(manifest.class_counts(), (1, 1));
    }

    #[test]
    fn manifest_rejects_bad_header_duplicates_and_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let bad_header = write_manifest(dir.path(), "file,label,subject\na.wav,positive,s1\n");
        assert!(matches!(
            load_manifest(&bad_header),
            Err(Error::ManifestHeader(_))
        ));

        let dup = dir.path().join("dup.csv");
        fs::write(
            &dup,
            "path,label,subject_id\na.wav,positive,s1\na.wav,negative,s2\n",
        )
        .unwrap();
        assert!(matches!(
            load_manifest(&dup),
            Err(Error::DuplicateManifestPath { .. })
        ));

        assert!(matches!(
            load_manifest(&dir.path().join("nope.csv")),
            Err(Error::ManifestNotFound(_))
        ));
    }

    #[test]
    fn imbalanced_dataset_counts() {
        // 73 negative + 48 positive segment rows
        let dir = tempfile::tempdir().unwrap();
        let mut body = String::from("path,label,subject_id\n");
        for i in 0..73 {
            body.push_str(&format!("neg_{i}.wav,negative,subj_n{}\n", i % 9));
        }
        for i in 0..48 {
            body.push_str(&format!("pos_{i}.wav,positive,subj_p{}\n", i % 7));
        }
        let path = write_manifest(dir.path(), &body);
        let manifest = load_manifest(&path).unwrap();
        assert_eq!(manifest.len(), 121);
        assert_eq!(manifest.class_counts(), (48, 73));
    }

    #[test]
    fn wav_roundtrip_is_lossless_on_grid() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        // values on the 16-bit grid, including both extremes
        let samples: Vec<f64> = [-32768i32, -12345, -1, 0, 1, 9999, 16384, 32767]
            .iter()
            .map(|&v| v as f64 / 32768.0)
            .collect();
        write_wav(&path, &samples, 48000).unwrap();
        let (back, rate) = read_wav(&path).unwrap();
        assert_eq!(rate, 48000);
        assert_eq!(back, samples);
    }

    #[test]
    fn wav_sample_scaling_identities() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        write_wav(&path, &[-1.0, 0.5], 8000).unwrap();
        let (samples, _) = read_wav(&path).unwrap();
        assert_eq!(samples[0], -1.0); // -32768 -> -1.0
        assert_eq!(samples[1], 0.5); // 16384 -> 0.5
    }

    #[test]
    fn wav_expected_length_for_fixed_duration() {
        // 48000 samples/s * 1.640 s
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        let samples = vec![0.25; 78720];
        write_wav(&path, &samples, 48000).unwrap();
        let (back, rate) = read_wav(&path).unwrap();
        assert_eq!(back.len(), 78720);
        assert_eq!(rate, 48000);
    }

    #[test]
    fn wav_truncated_data_chunk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        write_wav(&path, &[0.1; 100], 8000).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 10); // data now shorter than declared
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_wav(&path), Err(Error::Truncated { .. })));
    }

    #[test]
    fn wav_rejects_stereo_and_non_pcm() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        write_wav(&path, &[0.1; 10], 8000).unwrap();
        let good = fs::read(&path).unwrap();

        let mut stereo = good.clone();
        stereo[22] = 2; // channel count
        fs::write(&path, &stereo).unwrap();
        assert!(matches!(
            read_wav(&path),
            Err(Error::NotMono { channels: 2, .. })
        ));

        let mut float_fmt = good.clone();
        float_fmt[20] = 3; // IEEE float format code
        fs::write(&path, &float_fmt).unwrap();
        assert!(matches!(read_wav(&path), Err(Error::NonPcm { code: 3, .. })));

        let mut eight_bit = good;
        eight_bit[34] = 8;
        fs::write(&path, &eight_bit).unwrap();
        assert!(matches!(
            read_wav(&path),
            Err(Error::UnsupportedBitDepth { bits: 8, .. })
        ));
    }

    #[test]
    fn wav_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        fs::write(&path, b"definitely not audio").unwrap();
        assert!(matches!(read_wav(&path), Err(Error::NotWave { .. })));
    }

    #[test]
    fn segmentation_exact_fit() {
        let samples = vec![0.0; 78720];
        let (segments, warning) = segment_signal(&samples, 48000, 1640).unwrap();
        assert!(warning.is_none());
        assert_eq!(segments.len(), 1);
        assert_eq!(segments[0].len(), 78720);
    }

    #[test]
    fn segmentation_drops_remainder() {
        let samples: Vec<f64> = (0..100_000).map(|i| i as f64).collect();
        let (segments, warning) = segment_signal(&samples, 48000, 1640).unwrap();
        assert!(warning.is_none());
        assert_eq!(segments.len(), 1);
        assert_eq!(segments[0].len(), 78720);
    }

    #[test]
    fn segmentation_short_signal_warns() {
        let samples = vec![0.0; 50_000];
        let (segments, warning) = segment_signal(&samples, 48000, 1640).unwrap();
        assert!(segments.is_empty());
        let warning = warning.unwrap();
        assert_eq!(warning.window_len, 78720);
        assert_eq!(warning.signal_len, 50_000);
    }

    #[test]
    fn segments_concatenate_to_a_prefix_of_the_input() {
        let samples: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        let (segments, _) = segment_signal(&samples, 1000, 300).unwrap();
        assert_eq!(segments.len(), 3);
        let concatenated: Vec<f64> = segments.into_iter().flatten().collect();
        assert_eq!(&samples[..concatenated.len()], &concatenated[..]);
    }

    #[test]
    fn segmentation_rejects_degenerate_arguments() {
        assert!(segment_signal(&[1.0], 48000, 0).is_err());
        assert!(segment_signal(&[], 48000, 100).is_err());
    }

    #[test]
    fn load_dataset_mixed_rates_error() {
        let dir = tempfile::tempdir().unwrap();
        write_wav(&dir.path().join("a.wav"), &[0.1; 800], 8000).unwrap();
        write_wav(&dir.path().join("b.wav"), &[0.1; 1600], 16000).unwrap();
        let manifest = DatasetManifest::new(vec![
            ManifestEntry {
                path: "a.wav".into(),
                label: Label::Positive,
                subject_id: "s1".into(),
            },
            ManifestEntry {
                path: "b.wav".into(),
                label: Label::Negative,
                subject_id: "s2".into(),
            },
        ]);
        assert!(matches!(
            load_dataset(&manifest, dir.path(), 100),
            Err(Error::MixedSampleRates { .. })
        ));
    }

    #[test]
    fn load_dataset_counts_segments_per_subject() {
        let dir = tempfile::tempdir().unwrap();
        // 250 ms windows at 8 kHz = 2000 samples; file a holds 2, file b holds 1
        write_wav(&dir.path().join("a.wav"), &[0.1; 4400], 8000).unwrap();
        write_wav(&dir.path().join("b.wav"), &[0.2; 2100], 8000).unwrap();
        let manifest = DatasetManifest::new(vec![
            ManifestEntry {
                path: "a.wav".into(),
                label: Label::Positive,
                subject_id: "s1".into(),
            },
            ManifestEntry {
                path: "b.wav".into(),
                label: Label::Positive,
                subject_id: "s1".into(),
            },
        ]);
        let loaded = load_dataset(&manifest, dir.path(), 250).unwrap();
        assert_eq!(loaded.segments.len(), 3);
        let indices: Vec<usize> = loaded
            .segments
            .iter()
            .map(|s| s.source.segment_index)
            .collect();
        assert_eq!(indices, vec![0, 1, 2]);
        assert_eq!(loaded.sample_rate, 8000);
    }

    #[test]
    fn zscore_signal_normalizes() {
        let mut samples = vec![1.0, 2.0, 3.0];
        zscore_signal(&mut samples);
        assert!((samples[0] + 1.0).abs() < 1e-12);
        assert!(samples[1].abs() < 1e-12);
        assert!((samples[2] - 1.0).abs() < 1e-12);

        let mut flat = vec![5.0; 4];
        zscore_signal(&mut flat);
        assert!(flat.iter().all(|&v| v == 0.0));
    }
}
