use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::channel::{Frame, FrameGrid};
use crate::error::{invalid, Result};

/// Linear-frequency-modulated broadband source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LfmConfig {
    pub n_samples: usize,
    /// Hz.
    pub sample_rate: f64,
    /// Swept bandwidth, Hz.
    pub bandwidth: f64,
    /// Hz.
    pub center_frequency: f64,
}

/// Prototype sweep on a 256-bin desk-scale grid.
impl Default for LfmConfig {
    fn default() -> Self {
        LfmConfig {
            n_samples: 256,
            ..LfmConfig::prototype()
        }
    }
}

impl LfmConfig {
    /// 8192 samples at 160 MHz around 3.3 GHz.
    pub fn prototype() -> Self {
        LfmConfig {
            n_samples: 8192,
            sample_rate: 160e6,
            bandwidth: 160e6,
            center_frequency: 3.3e9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(invalid("n_samples", "must be positive"));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth <= self.sample_rate) {
            return Err(invalid(
                "bandwidth",
                format!("need 0 < bandwidth <= sample_rate, got {}", self.bandwidth),
            ));
        }
        Ok(())
    }

    /// Chirp duration, s.
    pub fn duration(&self) -> f64 {
        self.n_samples as f64 / self.sample_rate
    }

    pub fn grid(&self) -> Result<FrameGrid> {
        FrameGrid::new(self.n_samples, self.sample_rate, self.center_frequency, self.bandwidth)
    }
}

/// Time-domain baseband chirp sweeping `-B/2 -> +B/2` over the frame.
pub fn lfm_waveform(cfg: &LfmConfig) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    let t_total = cfg.duration();
    let rate = cfg.bandwidth / t_total;
    Ok((0..cfg.n_samples)
        .map(|n| {
            let t = n as f64 / cfg.sample_rate;
            let phase = 2.0 * PI * (-0.5 * cfg.bandwidth * t + 0.5 * rate * t * t);
            Complex64::cis(phase)
        })
        .collect())
}

/// The chirp in the frequency domain, unitary-scaled and reordered so bin 0
/// is `-sample_rate/2`.
pub fn lfm_frame(cfg: &LfmConfig) -> Result<Frame> {
    let mut buf = lfm_waveform(cfg)?;
    let n = buf.len();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    // fftshift: DC moves to index n/2
    let spectrum = (0..n)
        .map(|k| buf[(k + n - n / 2) % n] * scale)
        .collect();
    Frame::new(cfg.grid()?, spectrum, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prototype_frame_duration() {
        let cfg = LfmConfig::prototype();
        assert!((cfg.duration() - 51.2e-6).abs() < 1e-15);
    }

    #[test]
    fn spectrum_is_flat_over_the_sweep() {
        for cfg in [
            LfmConfig::prototype(),
            LfmConfig {
                n_samples: 256,
                ..LfmConfig::prototype()
            },
            LfmConfig {
                n_samples: 1024,
                bandwidth: 80e6,
                ..LfmConfig::prototype()
            },
        ] {
            let f = lfm_frame(&cfg).unwrap();
            let occ = f.grid.occupied();
            let edge = occ.len() * 5 / 100;
            let mags: Vec<f64> = f.spectrum[occ.start + edge..occ.end - edge]
                .iter()
                .map(|v| v.norm())
                .collect();
            let max = mags.iter().cloned().fold(0.0, f64::max);
            let min = mags.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(min / max > 0.5, "n={} ratio {}", cfg.n_samples, min / max);
        }
    }

    #[test]
    fn frames_are_bit_identical() {
        let cfg = LfmConfig::prototype();
        assert_eq!(lfm_frame(&cfg).unwrap(), lfm_frame(&cfg).unwrap());
    }

    #[test]
    fn rejects_bandwidth_above_sample_rate() {
        let cfg = LfmConfig {
            bandwidth: 200e6,
            ..LfmConfig::prototype()
        };
        assert!(lfm_frame(&cfg).is_err());
    }
}
