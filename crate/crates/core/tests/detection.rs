use cavitylink::channel::{run_schedule, CodebookSchedule, Frame, ScattererMotion};
use cavitylink::harness::{ppm_link, Preset};
use cavitylink::modem::{detect_pulses, ofdm_baseline, PulseDetectorConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::Desk;

fn walking_run(seed: u64, switches: &[usize], n_frames: usize) -> (Desk, Vec<Frame>) {
    let desk = Desk::new(seed);
    let motion = desk.cfg.motion_for(Preset::Walking, &desk.ensemble).unwrap();
    let flip = desk.codebook.complement();
    let sched = CodebookSchedule::toggling(&desk.codebook, &flip, switches).unwrap();
    let mut real = desk.realization(seed + 31);
    let frames = run_schedule(
        &mut real,
        &sched,
        &motion,
        &desk.panel,
        |_| desk.source.clone(),
        n_frames,
        desk.cfg.snr_db,
    )
    .unwrap();
    (desk, frames)
}

#[test]
fn switches_are_found_exactly_under_drift() {
    let switches = [10, 20, 35];
    let mut failures = Vec::new();
    for seed in 0..50 {
        let (desk, frames) = walking_run(seed, &switches, 60);
        let trace = detect_pulses(&frames, &desk.cfg.detector).unwrap();
        if trace.pulse_indices != switches {
            failures.push((seed, trace.pulse_indices));
        }
    }
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn prepending_identical_frames_shifts_pulses() {
    let (desk, frames) = walking_run(3, &[12, 30, 41], 50);
    let base = detect_pulses(&frames, &desk.cfg.detector).unwrap();
    let fixed = PulseDetectorConfig {
        eta: Some(base.eta),
        ..desk.cfg.detector
    };
    for k in [1usize, 4, 9] {
        let mut longer = vec![frames[0].clone(); k];
        longer.extend(frames.iter().cloned());
        let shifted = detect_pulses(&longer, &fixed).unwrap();
        let expect: Vec<usize> = base.pulse_indices.iter().map(|p| p + k).collect();
        assert_eq!(shifted.pulse_indices, expect);
    }
}

#[test]
fn noiseless_static_link_is_lossless() {
    let desk = Desk::new(8);
    let mut cfg = desk.cfg.clone();
    cfg.snr_db = f64::INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for len in [0, 2, 64, 1000] {
        let bits: Vec<bool> = (0..len).map(|_| rng.random()).collect();
        let run = ppm_link(&cfg, &desk.ensemble, Preset::Stationary, &bits, 9).unwrap();
        let d = run.decoded.expect("start pulse");
        assert_eq!(d.bits, bits);
        assert!(d.erasures.is_empty());
    }
}

#[test]
fn ofdm_ber_grows_with_drift_rate() {
    let fractions = [0.0, 0.01, 0.03, 0.1];
    let mut bers = vec![0.0; fractions.len()];
    for seed in 0..6 {
        let desk = Desk::new(seed);
        let sp = desk.ensemble.mean_spacing();
        let sched = CodebookSchedule::constant(desk.codebook.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<bool> = (0..512 * 40).map(|_| rng.random()).collect();
        let real = desk.realization(seed + 2);
        for (i, f) in fractions.iter().enumerate() {
            let motion = if *f == 0.0 {
                ScattererMotion::disabled()
            } else {
                ScattererMotion::new(f * sp, *f).unwrap()
            };
            let r = ofdm_baseline(&real, &sched, &motion, &desk.panel, &desk.source, &bits, 20.0).unwrap();
            bers[i] += r.ber;
        }
    }
    assert!(bers.windows(2).all(|w| w[1] >= w[0]), "{bers:?}");
    assert!(bers[3] > bers[0]);
}
