use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{FrameGrid, ScattererMotion};
use crate::eigenmode::{sample_ensemble, CavityGeometry, EigenmodeEnsemble};
use crate::error::{invalid, Error, Result};
use crate::modem::{LfmConfig, PpmConfig, PulseDetectorConfig};
use crate::perturbation::RisPanel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CavityConfig {
    /// m^3.
    pub volume: f64,
    /// s.
    pub tau: f64,
    pub a0: f64,
    pub alpha_sigma: f64,
    /// Extra width of the sampled mode band beyond the signal band.
    pub band_margin: f64,
}

impl Default for CavityConfig {
    fn default() -> Self {
        CavityConfig {
            volume: 0.1,
            tau: 0.15e-6,
            a0: 1.0,
            alpha_sigma: 1.0,
            band_margin: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PanelConfig {
    pub unit_count: usize,
    /// m^2.
    pub unit_area: f64,
    /// rad.
    pub delta_phi: f64,
    /// Jitter per sqrt(flipped unit) as a fraction of the mean mode spacing;
    /// `None` makes a full switch move modes by one mean spacing.
    pub kappa_fraction: Option<f64>,
}

impl Default for PanelConfig {
    fn default() -> Self {
        PanelConfig {
            unit_count: 512,
            unit_area: 0.01,
            delta_phi: PI,
            kappa_fraction: None,
        }
    }
}

/// Per-frame random-walk step of scatterer motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftPreset {
    /// Eigenfrequency step std in units of the mean mode spacing.
    pub spacing_fraction: f64,
    /// Phase step std, rad.
    pub phase_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotionConfig {
    pub walking: DriftPreset,
    pub running: DriftPreset,
}

impl Default for MotionConfig {
    fn default() -> Self {
        MotionConfig {
            walking: DriftPreset {
                spacing_fraction: 0.02,
                phase_step: 0.02,
            },
            running: DriftPreset {
                spacing_fraction: 0.3,
                phase_step: 0.3,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Stationary,
    Walking,
    Running,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Stationary, Preset::Walking, Preset::Running];

    pub fn label(self) -> &'static str {
        match self {
            Preset::Stationary => "stationary",
            Preset::Walking => "walking",
            Preset::Running => "running",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsdVarianceConfig {
    pub flip_counts: Vec<usize>,
    pub n_seeds: usize,
}

impl Default for PsdVarianceConfig {
    fn default() -> Self {
        PsdVarianceConfig {
            flip_counts: (0..=8).map(|k| k * 64).collect(),
            n_seeds: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoCodebooksConfig {
    /// Frames averaged into each PSD estimate.
    pub averaged_frames: usize,
}

impl Default for TwoCodebooksConfig {
    fn default() -> Self {
        TwoCodebooksConfig { averaged_frames: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThreeScenariosConfig {
    pub n_frames: usize,
    pub switch_frames: Vec<usize>,
    pub preset: Preset,
}

impl Default for ThreeScenariosConfig {
    fn default() -> Self {
        ThreeScenariosConfig {
            n_frames: 100,
            switch_frames: vec![40, 55, 70, 85],
            preset: Preset::Walking,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BerTableConfig {
    pub n_bits: usize,
    /// Preset whose PPM schedule and motion the OFDM baseline shares.
    pub ofdm_preset: Preset,
}

impl Default for BerTableConfig {
    fn default() -> Self {
        BerTableConfig {
            n_bits: 2048,
            ofdm_preset: Preset::Walking,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoundtripConfig {
    pub preset: Preset,
}

impl Default for RoundtripConfig {
    fn default() -> Self {
        RoundtripConfig {
            preset: Preset::Stationary,
        }
    }
}

/// Everything that determines a run. Every field has a default except the
/// seed, which comes from the file or the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    /// SNR in dB relative to the mean received power; `inf` disables noise.
    pub snr_db: f64,
    /// Frame period, s.
    pub frame_period: f64,
    pub cavity: CavityConfig,
    pub panel: PanelConfig,
    pub lfm: LfmConfig,
    pub detector: PulseDetectorConfig,
    pub ppm: PpmConfig,
    pub motion: MotionConfig,
    pub psd_variance: PsdVarianceConfig,
    pub two_codebooks: TwoCodebooksConfig,
    pub three_scenarios: ThreeScenariosConfig,
    pub ber_table: BerTableConfig,
    pub roundtrip: RoundtripConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: None,
            snr_db: 20.0,
            frame_period: 51.2e-6,
            cavity: CavityConfig::default(),
            panel: PanelConfig::default(),
            lfm: LfmConfig::default(),
            detector: PulseDetectorConfig::default(),
            ppm: PpmConfig::default(),
            motion: MotionConfig::default(),
            psd_variance: PsdVarianceConfig::default(),
            two_codebooks: TwoCodebooksConfig::default(),
            three_scenarios: ThreeScenariosConfig::default(),
            ber_table: BerTableConfig::default(),
            roundtrip: RoundtripConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Applies a seed override and checks every sub-configuration.
    pub fn resolve(mut self, seed: Option<u64>) -> Result<Self> {
        if seed.is_some() {
            self.seed = seed;
        }
        if self.seed.is_none() {
            return Err(Error::Config("seed is mandatory".into()));
        }
        self.validate()?;
        Ok(self)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_nan() {
            return Err(invalid("snr_db", "must be a number or inf"));
        }
        if !(self.frame_period > 0.0 && self.frame_period.is_finite()) {
            return Err(invalid("frame_period", "must be positive"));
        }
        self.lfm.validate()?;
        self.detector.validate()?;
        self.ppm.validate()?;
        self.geometry()?;
        if self.panel.unit_count == 0 {
            return Err(invalid("panel.unit_count", "must be positive"));
        }
        if let Some(k) = self.panel.kappa_fraction {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(invalid("panel.kappa_fraction", "must be non-negative"));
            }
        }
        for (name, p) in [("walking", self.motion.walking), ("running", self.motion.running)] {
            if !(p.spacing_fraction >= 0.0 && p.phase_step >= 0.0) {
                return Err(invalid("motion", format!("{name} preset steps must be non-negative")));
            }
        }
        if self.psd_variance.n_seeds < 2 {
            return Err(invalid("psd_variance.n_seeds", "need at least 2"));
        }
        if self.psd_variance.flip_counts.iter().any(|&h| h > self.panel.unit_count) {
            return Err(invalid("psd_variance.flip_counts", "cannot exceed unit_count"));
        }
        if self.two_codebooks.averaged_frames == 0 {
            return Err(invalid("two_codebooks.averaged_frames", "must be positive"));
        }
        let ts = &self.three_scenarios;
        if ts.switch_frames.windows(2).any(|w| w[0] >= w[1])
            || ts.switch_frames.iter().any(|&f| f == 0 || f >= ts.n_frames)
        {
            return Err(invalid(
                "three_scenarios.switch_frames",
                "must be increasing and inside (0, n_frames)",
            ));
        }
        if !self.ber_table.n_bits.is_multiple_of(self.ppm.bits_per_symbol()) {
            return Err(invalid("ber_table.n_bits", "must be a multiple of the PPM symbol size"));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<CavityGeometry> {
        CavityGeometry::from_center_frequency(
            self.cavity.volume,
            self.cavity.tau,
            self.cavity.a0,
            self.lfm.center_frequency,
        )
    }

    pub fn grid(&self) -> Result<FrameGrid> {
        self.lfm.grid()
    }

    pub fn ensemble(&self, seed: u64) -> Result<EigenmodeEnsemble> {
        let (lo, hi) = self.grid()?.mode_band(self.cavity.band_margin);
        sample_ensemble(seed, &self.geometry()?, lo, hi, self.cavity.alpha_sigma)
    }

    pub fn panel_for(&self, ensemble: &EigenmodeEnsemble) -> Result<RisPanel> {
        let u = self.panel.unit_count;
        let kappa = match self.panel.kappa_fraction {
            Some(f) => f * ensemble.mean_spacing(),
            None => RisPanel::calibrated_kappa(u, ensemble.mean_spacing()),
        };
        RisPanel::new(u, self.panel.unit_area, self.panel.delta_phi, self.geometry()?.lambda, kappa)
    }

    pub fn motion_for(&self, preset: Preset, ensemble: &EigenmodeEnsemble) -> Result<ScattererMotion> {
        let p = match preset {
            Preset::Stationary => return Ok(ScattererMotion::disabled()),
            Preset::Walking => self.motion.walking,
            Preset::Running => self.motion.running,
        };
        ScattererMotion::new(p.spacing_fraction * ensemble.mean_spacing(), p.phase_step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert!(matches!(c.clone().resolve(None), Err(Error::Config(_))));
        assert_eq!(c.resolve(Some(9)).unwrap().seed(), 9);
    }

    #[test]
    fn nested_overrides_and_unknown_keys() {
        let c = ExperimentConfig::from_toml(
            "seed = 3\nsnr_db = inf\n[lfm]\nn_samples = 128\n[motion.walking]\nspacing_fraction = 0.05\nphase_step = 0.0\n",
        )
        .unwrap();
        assert_eq!(c.seed, Some(3));
        assert!(c.snr_db.is_infinite());
        assert_eq!(c.lfm.n_samples, 128);
        assert_eq!(c.lfm.bandwidth, 160e6);
        assert_eq!(c.motion.walking.spacing_fraction, 0.05);
        assert_eq!(c.resolve(Some(4)).unwrap().seed(), 4);
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
        assert!(ExperimentConfig::from_toml("[ppm]\nm_ary = 3").unwrap().resolve(Some(1)).is_err());
    }

    #[test]
    fn toml_roundtrip() {
        let c = ExperimentConfig {
            seed: Some(5),
            ..Default::default()
        };
        let text = toml::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn default_setup_is_consistent() {
        let c = ExperimentConfig::default().resolve(Some(1)).unwrap();
        let ens = c.ensemble(1).unwrap();
        assert!(ens.n_m() > 100);
        let panel = c.panel_for(&ens).unwrap();
        assert!((panel.kappa * (panel.unit_count as f64).sqrt() - ens.mean_spacing()).abs() < 1e-6 * ens.mean_spacing());
        assert!(!c.motion_for(Preset::Stationary, &ens).unwrap().enabled);
        let run = c.motion_for(Preset::Running, &ens).unwrap();
        let walk = c.motion_for(Preset::Walking, &ens).unwrap();
        assert!(run.drift_rate > walk.drift_rate);
    }
}
