//! Frame-to-frame pulse detector.
//!
//! A codebook switch changes the received power spectrum abruptly while
//! scatterer motion only deforms it a little between neighbouring frames.
//! The detector measures the DTW distance between the normalized magnitude
//! spectra of consecutive frames and flags the frames where it reaches a
//! threshold.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::dtw::dtw_distance;
use crate::channel::Frame;
use crate::error::{invalid, Error, Result};

/// Default multiplier of the interquartile range in the automatic threshold.
pub const DEFAULT_IQR_K: f64 = 6.0;
/// Default Sakoe-Chiba half-width as a fraction of the spectrum length.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseDetectorConfig {
    /// Fixed distance threshold; `None` calibrates it from the first
    /// `calibration_frames` distances.
    pub eta: Option<f64>,
    /// DTW band half-width in bins; `None` uses 2% of the spectrum length.
    pub window: Option<usize>,
    pub calibration_frames: usize,
    /// Threshold is `median + iqr_k * IQR` of the calibration distances.
    pub iqr_k: f64,
}

impl Default for PulseDetectorConfig {
    fn default() -> Self {
        PulseDetectorConfig {
            eta: None,
            window: None,
            calibration_frames: 32,
            iqr_k: DEFAULT_IQR_K,
        }
    }
}

impl PulseDetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(eta) = self.eta {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(invalid("eta", format!("must be positive, got {eta}")));
            }
        }
        if self.eta.is_none() && self.calibration_frames < 2 {
            return Err(invalid("calibration_frames", "need at least 2 to calibrate"));
        }
        if !(self.iqr_k > 0.0) {
            return Err(invalid("iqr_k", "must be positive"));
        }
        Ok(())
    }

    pub fn window_for(&self, len: usize) -> usize {
        self.window
            .unwrap_or_else(|| ((len as f64 * DEFAULT_WINDOW_FRACTION).round() as usize).max(1))
    }
}

/// Per-frame detector output. `distances[n]` compares frame `n - 1` with
/// frame `n`; frame 0 has no predecessor and carries distance 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorTrace {
    pub distances: Vec<f64>,
    pub decisions: Vec<bool>,
    pub pulse_indices: Vec<usize>,
    pub eta: f64,
}

impl DetectorTrace {
    /// Thresholds `distances` at `eta`: a pulse wherever `distance >= eta`.
    pub fn from_distances(distances: Vec<f64>, eta: f64) -> Self {
        let decisions: Vec<bool> = distances.iter().map(|&d| d >= eta).collect();
        let pulse_indices = decisions
            .iter()
            .enumerate()
            .filter_map(|(n, &d)| d.then_some(n))
            .collect();
        DetectorTrace {
            distances,
            decisions,
            pulse_indices,
            eta,
        }
    }

    /// `n,distance,decision` rows with a header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,distance,decision")?;
        for (n, (d, p)) in self.distances.iter().zip(&self.decisions).enumerate() {
            writeln!(w, "{n},{d},{}", u8::from(*p))?;
        }
        Ok(())
    }
}

/// Occupied-bin magnitude spectrum scaled to unit RMS.
pub fn normalize_spectrum(frame: &Frame) -> Result<Vec<f64>> {
    let mags: Vec<f64> = frame.spectrum[frame.grid.occupied()]
        .iter()
        .map(|v| v.norm())
        .collect();
    let rms = (mags.iter().map(|m| m * m).sum::<f64>() / mags.len() as f64).sqrt();
    if rms == 0.0 {
        return Err(Error::ZeroFrame);
    }
    Ok(mags.into_iter().map(|m| m / rms).collect())
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Robust threshold `median + k IQR`, never below a small positive floor so
/// that a perfectly static channel does not flag every frame.
pub fn calibrate_threshold(distances: &[f64], k: f64) -> Result<f64> {
    const FLOOR: f64 = 1e-9;
    if distances.is_empty() {
        return Err(invalid("calibration_frames", "no distances to calibrate on"));
    }
    let mut sorted = distances.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = quantile(&sorted, 0.5);
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    Ok((median + k * iqr).max(FLOOR))
}

/// DTW distance between the normalized spectra of two frames.
pub fn frame_distance(a: &Frame, b: &Frame, window: usize) -> Result<f64> {
    dtw_distance(&normalize_spectrum(a)?, &normalize_spectrum(b)?, window)
}

pub fn detect_pulses(frames: &[Frame], cfg: &PulseDetectorConfig) -> Result<DetectorTrace> {
    if frames.len() < 2 {
        return Err(Error::TooFewFrames(frames.len()));
    }
    cfg.validate()?;
    let spectra = frames.iter().map(normalize_spectrum).collect::<Result<Vec<_>>>()?;
    let window = cfg.window_for(spectra[0].len());
    let mut distances = Vec::with_capacity(frames.len());
    distances.push(0.0);
    for pair in spectra.windows(2) {
        distances.push(dtw_distance(&pair[0], &pair[1], window)?);
    }
    let eta = match cfg.eta {
        Some(eta) => eta,
        None => {
            let end = (cfg.calibration_frames + 1).min(distances.len());
            calibrate_threshold(&distances[1..end], cfg.iqr_k)?
        }
    };
    Ok(DetectorTrace::from_distances(distances, eta))
}
