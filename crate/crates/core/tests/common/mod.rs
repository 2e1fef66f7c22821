#![allow(dead_code)]

use cavitylink::channel::{ChannelRealization, Frame};
use cavitylink::eigenmode::EigenmodeEnsemble;
use cavitylink::harness::ExperimentConfig;
use cavitylink::modem::lfm_frame;
use cavitylink::perturbation::{Codebook, RisPanel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Desk {
    pub cfg: ExperimentConfig,
    pub ensemble: EigenmodeEnsemble,
    pub panel: RisPanel,
    pub codebook: Codebook,
    pub source: Frame,
}

impl Desk {
    pub fn new(seed: u64) -> Desk {
        let cfg = ExperimentConfig::default().resolve(Some(seed)).unwrap();
        let ensemble = cfg.ensemble(seed).unwrap();
        let panel = cfg.panel_for(&ensemble).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let codebook = Codebook::random(panel.unit_count, &mut rng);
        let source = lfm_frame(&cfg.lfm).unwrap();
        Desk {
            cfg,
            ensemble,
            panel,
            codebook,
            source,
        }
    }

    pub fn realization(&self, seed: u64) -> ChannelRealization {
        ChannelRealization::new(
            self.ensemble.clone(),
            self.cfg.geometry().unwrap(),
            self.cfg.grid().unwrap(),
            self.cfg.frame_period,
            self.codebook.clone(),
            seed,
        )
        .unwrap()
    }
}

/// |<a, b>| / (|a| |b|).
pub fn complex_correlation(a: &[num_complex::Complex64], b: &[num_complex::Complex64]) -> f64 {
    let dot: num_complex::Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    dot.norm() / (na * nb)
}

pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}
