//! Experiment runner.
//!
//! Each experiment has a pure compute step (`psd_variance`, `two_codebooks`,
//! ...) that returns a serializable result, and an `exp_*` wrapper that also
//! writes CSV files plus `summary.json` into an output directory. Outputs
//! depend only on the configuration and seed, so reruns are byte-identical.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{
    apply_codebook_switch, propagate_frame, run_schedule, write_frames_binary, write_frames_csv, ChannelRealization,
    CodebookSchedule, Frame, ScattererMotion,
};
use crate::eigenmode::{transfer_function, EigenmodeEnsemble};
use crate::error::{Error, Result};
use crate::modem::{
    bits_to_bytes, bytes_to_bits, detect_pulses, lfm_frame, ofdm_baseline, ppm_decode, ppm_encode, DetectorTrace,
    PpmDecoded,
};
use crate::perturbation::{perturb_ensemble, Codebook};

pub use config::{
    BerTableConfig, CavityConfig, DriftPreset, ExperimentConfig, MotionConfig, PanelConfig, Preset,
    PsdVarianceConfig, RoundtripConfig, ThreeScenariosConfig, TwoCodebooksConfig,
};

/// Independent sub-seed number `index` of stream `stream`.
pub fn sub_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

fn random_bits(n: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random()).collect()
}

/// Pearson correlation coefficient; 0 when either input is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Occupied-bin power spectrum scaled to unit mean.
fn normalized_psd(spectrum: &[Complex64], occupied: std::ops::Range<usize>) -> Vec<f64> {
    let p: Vec<f64> = spectrum[occupied].iter().map(|v| v.norm_sqr()).collect();
    let mean = p.iter().sum::<f64>() / p.len() as f64;
    if mean == 0.0 {
        return p;
    }
    p.into_iter().map(|v| v / mean).collect()
}

fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = a.iter().map(|x| x * x).sum();
    (num / den).sqrt()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `bytes` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(&target))?;
    tmp.persist(&target).map_err(|e| Error::Io {
        path: target.clone(),
        source: e.error,
    })?;
    Ok(target)
}

#[derive(Serialize)]
struct Summary<'a, R: Serialize> {
    experiment: &'a str,
    seed: u64,
    config: &'a ExperimentConfig,
    results: &'a R,
}

fn write_summary<R: Serialize>(dir: &Path, experiment: &str, cfg: &ExperimentConfig, results: &R) -> Result<()> {
    let s = Summary {
        experiment,
        seed: cfg.seed(),
        config: cfg,
        results,
    };
    let mut text = serde_json::to_vec_pretty(&s)?;
    text.push(b'\n');
    write_atomic(dir, "summary.json", &text)?;
    Ok(())
}

fn source_frame(cfg: &ExperimentConfig) -> Result<Frame> {
    lfm_frame(&cfg.lfm)
}

// ---------------------------------------------------------------- PSD variance

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdVariancePoint {
    pub units_flipped: usize,
    /// Mean over seeds of the per-bin variance of the normalized PSD change.
    pub psd_variance: f64,
    /// Standard error of that mean.
    pub psd_variance_sem: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdVarianceResult {
    pub points: Vec<PsdVariancePoint>,
    pub pearson: f64,
}

/// Sweeps the number of flipped RIS units and measures how much the
/// normalized received PSD changes, averaged over independent cavities.
pub fn psd_variance(cfg: &ExperimentConfig) -> Result<PsdVarianceResult> {
    let seed = cfg.seed();
    let grid = cfg.grid()?;
    let geom = cfg.geometry()?;
    let omega = grid.omega_grid();
    let x = source_frame(cfg)?;
    let occ = grid.occupied();
    let psd_of = |ens: &EigenmodeEnsemble| {
        let y: Vec<Complex64> = transfer_function(ens, &geom, &omega)
            .iter()
            .zip(&x.spectrum)
            .map(|(h, s)| h * s)
            .collect();
        normalized_psd(&y, occ.clone())
    };
    let counts = &cfg.psd_variance.flip_counts;
    let n_seeds = cfg.psd_variance.n_seeds;
    let mut samples = vec![Vec::with_capacity(n_seeds); counts.len()];
    for s in 0..n_seeds as u64 {
        let ens = cfg.ensemble(sub_seed(seed, 1, s))?;
        let panel = cfg.panel_for(&ens)?;
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 2, s));
        let a = Codebook::random(panel.unit_count, &mut rng);
        let p_a = psd_of(&ens);
        for (i, &h) in counts.iter().enumerate() {
            let b = a.with_flips(h, &mut rng);
            let p_b = psd_of(&perturb_ensemble(&ens, &a, &b, &panel, rng.next_u64())?);
            let d: Vec<f64> = p_a.iter().zip(&p_b).map(|(u, v)| v - u).collect();
            let m = d.iter().sum::<f64>() / d.len() as f64;
            samples[i].push(d.iter().map(|v| (v - m).powi(2)).sum::<f64>() / d.len() as f64);
        }
    }
    let points: Vec<PsdVariancePoint> = counts
        .iter()
        .zip(&samples)
        .map(|(&h, v)| {
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            PsdVariancePoint {
                units_flipped: h,
                psd_variance: mean,
                psd_variance_sem: (var / n).sqrt(),
            }
        })
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.units_flipped as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.psd_variance).collect();
    Ok(PsdVarianceResult {
        pearson: pearson(&xs, &ys),
        points,
    })
}

impl PsdVarianceResult {
    pub fn to_csv(&self) -> Vec<u8> {
        let mut out = b"units_flipped,psd_variance,psd_variance_sem\n".to_vec();
        for p in &self.points {
            let _ = writeln!(out, "{},{},{}", p.units_flipped, p.psd_variance, p.psd_variance_sem);
        }
        out
    }
}

pub fn exp_psd_variance(cfg: &ExperimentConfig, out: &Path) -> Result<PsdVarianceResult> {
    let r = psd_variance(cfg)?;
    write_atomic(out, "psd_variance.csv", &r.to_csv())?;
    write_summary(out, "psd-variance", cfg, &r)?;
    Ok(r)
}

// --------------------------------------------------------------- two codebooks

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoCodebooksResult {
    pub codebook_a: Codebook,
    pub codebook_b: Codebook,
    pub hamming: usize,
    pub frequency_hz: Vec<f64>,
    pub psd_a: Vec<f64>,
    pub psd_b: Vec<f64>,
    /// Relative L2 distance between the PSDs under codebooks A and B.
    pub l2_distance: f64,
    /// Same distance between two independent estimates under codebook A.
    pub noise_baseline: f64,
    #[serde(skip)]
    pub ensemble: Option<EigenmodeEnsemble>,
}

/// Received PSD of the LFM frame under two random codebooks, each averaged
/// over `two_codebooks.averaged_frames` frames, plus a second independent
/// estimate under the first codebook as the noise reference.
pub fn two_codebooks(cfg: &ExperimentConfig) -> Result<TwoCodebooksResult> {
    let seed = cfg.seed();
    let grid = cfg.grid()?;
    let ens = cfg.ensemble(sub_seed(seed, 3, 0))?;
    let panel = cfg.panel_for(&ens)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 3, 1));
    let a = Codebook::random(panel.unit_count, &mut rng);
    let b = Codebook::random(panel.unit_count, &mut rng);
    let x = source_frame(cfg)?;
    let occ = grid.occupied();
    let k = cfg.two_codebooks.averaged_frames;
    let estimate = |real: &mut ChannelRealization| -> Result<Vec<f64>> {
        let mut acc = vec![0.0; grid.n_bins];
        for _ in 0..k {
            let y = propagate_frame(real, &x, cfg.snr_db)?;
            for (s, v) in acc.iter_mut().zip(&y.spectrum) {
                *s += v.norm_sqr();
            }
        }
        let amp: Vec<Complex64> = acc.into_iter().map(|p| Complex64::new(p.sqrt(), 0.0)).collect();
        Ok(normalized_psd(&amp, occ.clone()))
    };
    let mut real = ChannelRealization::new(
        ens.clone(),
        cfg.geometry()?,
        grid,
        cfg.frame_period,
        a.clone(),
        sub_seed(seed, 3, 2),
    )?;
    let psd_a = estimate(&mut real)?;
    let psd_a2 = estimate(&mut real)?;
    let mut real_b = apply_codebook_switch(&real, &a, &b, &panel)?;
    let psd_b = estimate(&mut real_b)?;
    Ok(TwoCodebooksResult {
        hamming: a.hamming(&b)?,
        frequency_hz: occ.map(|k| grid.center_frequency + grid.offset_hz(k)).collect(),
        l2_distance: relative_l2(&psd_a, &psd_b),
        noise_baseline: relative_l2(&psd_a, &psd_a2),
        codebook_a: a,
        codebook_b: b,
        psd_a,
        psd_b,
        ensemble: Some(ens),
    })
}

impl TwoCodebooksResult {
    pub fn to_csv(&self) -> Vec<u8> {
        let mut out = b"bin_index,frequency_hz,psd_a,psd_b\n".to_vec();
        for (i, ((f, a), b)) in self.frequency_hz.iter().zip(&self.psd_a).zip(&self.psd_b).enumerate() {
            let _ = writeln!(out, "{i},{f},{a},{b}");
        }
        out
    }
}

#[derive(Serialize)]
struct TwoCodebooksSummary<'a> {
    codebook_a: &'a Codebook,
    codebook_b: &'a Codebook,
    hamming: usize,
    l2_distance: f64,
    noise_baseline: f64,
}

pub fn exp_two_codebooks(cfg: &ExperimentConfig, out: &Path) -> Result<TwoCodebooksResult> {
    let r = two_codebooks(cfg)?;
    write_atomic(out, "two_codebooks.csv", &r.to_csv())?;
    if let Some(ens) = &r.ensemble {
        let mut text = serde_json::to_vec_pretty(ens)?;
        text.push(b'\n');
        write_atomic(out, "ensemble.json", &text)?;
    }
    let hex = format!("a,{}\nb,{}\n", r.codebook_a.to_hex(), r.codebook_b.to_hex());
    write_atomic(out, "codebooks.txt", hex.as_bytes())?;
    let s = TwoCodebooksSummary {
        codebook_a: &r.codebook_a,
        codebook_b: &r.codebook_b,
        hamming: r.hamming,
        l2_distance: r.l2_distance,
        noise_baseline: r.noise_baseline,
    };
    write_summary(out, "two-codebooks", cfg, &s)?;
    Ok(r)
}

// ------------------------------------------------------------- three scenarios

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub name: String,
    pub expected: Vec<usize>,
    pub pulse_indices: Vec<usize>,
    pub eta: f64,
    pub exact: bool,
    #[serde(skip)]
    pub frames: Vec<Frame>,
    #[serde(skip)]
    pub trace: Option<DetectorTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeScenariosResult {
    pub scenarios: Vec<ScenarioOutcome>,
}

/// Switch-only, drift-only and drift-plus-switch runs over one cavity.
pub fn three_scenarios(cfg: &ExperimentConfig) -> Result<ThreeScenariosResult> {
    let seed = cfg.seed();
    let ts = &cfg.three_scenarios;
    let ens = cfg.ensemble(sub_seed(seed, 4, 0))?;
    let panel = cfg.panel_for(&ens)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 4, 1));
    let a = Codebook::random(panel.unit_count, &mut rng);
    let b = a.complement();
    let motion = cfg.motion_for(ts.preset, &ens)?;
    let toggles = CodebookSchedule::toggling(&a, &b, &ts.switch_frames)?;
    let steady = CodebookSchedule::constant(a.clone());
    let x = source_frame(cfg)?;
    let runs: [(&str, &CodebookSchedule, ScattererMotion); 3] = [
        ("switch_only", &toggles, ScattererMotion::disabled()),
        ("drift_only", &steady, motion),
        ("drift_and_switch", &toggles, motion),
    ];
    let mut scenarios = Vec::new();
    for (i, (name, sched, motion)) in runs.into_iter().enumerate() {
        let mut real = ChannelRealization::new(
            ens.clone(),
            cfg.geometry()?,
            cfg.grid()?,
            cfg.frame_period,
            a.clone(),
            sub_seed(seed, 5, i as u64),
        )?;
        let frames = run_schedule(&mut real, sched, &motion, &panel, |_| x.clone(), ts.n_frames, cfg.snr_db)?;
        let trace = detect_pulses(&frames, &cfg.detector)?;
        let expected = sched.switch_frames(&a);
        scenarios.push(ScenarioOutcome {
            name: name.to_string(),
            exact: trace.pulse_indices == expected,
            expected,
            pulse_indices: trace.pulse_indices.clone(),
            eta: trace.eta,
            frames,
            trace: Some(trace),
        });
    }
    Ok(ThreeScenariosResult { scenarios })
}

pub fn exp_three_scenarios(cfg: &ExperimentConfig, out: &Path) -> Result<ThreeScenariosResult> {
    let r = three_scenarios(cfg)?;
    for s in &r.scenarios {
        if let Some(trace) = &s.trace {
            let mut csv = Vec::new();
            trace.write_csv(&mut csv)?;
            write_atomic(out, &format!("{}_trace.csv", s.name), &csv)?;
        }
        let mut csv = Vec::new();
        write_frames_csv(&mut csv, &s.frames)?;
        write_atomic(out, &format!("{}_spectra.csv", s.name), &csv)?;
        let mut bin = Vec::new();
        write_frames_binary(&mut bin, &s.frames)?;
        write_atomic(out, &format!("{}_frames.bin", s.name), &bin)?;
    }
    write_summary(out, "three-scenarios", cfg, &r)?;
    Ok(r)
}

// ------------------------------------------------------------------- PPM link

/// One pass of the gap-coded PPM link over a simulated cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkRun {
    pub sent: Vec<bool>,
    /// `None` when the detector found no pulse at all.
    pub decoded: Option<PpmDecoded>,
    pub trace: DetectorTrace,
    pub schedule: CodebookSchedule,
    pub n_frames: usize,
    pub lead_in: usize,
}

impl LinkRun {
    /// Wrong bits plus bits that never arrived; a failed decode loses all.
    pub fn bit_errors(&self) -> usize {
        match &self.decoded {
            None => self.sent.len(),
            Some(d) => {
                let overlap = self.sent.len().min(d.bits.len());
                let wrong = self.sent[..overlap]
                    .iter()
                    .zip(&d.bits)
                    .filter(|(a, b)| a != b)
                    .count();
                wrong + self.sent.len() - overlap
            }
        }
    }

    pub fn erasures(&self) -> usize {
        self.decoded.as_ref().map_or(0, |d| d.erasures.len())
    }
}

/// Sends `bits` through the cavity `ensemble` under drift `preset`.
///
/// The RIS holds the first library codebook for a lead-in of
/// `calibration_frames + 1` frames so that the detector calibrates on
/// drift-only distances, then the PPM schedule starts.
pub fn ppm_link(
    cfg: &ExperimentConfig,
    ensemble: &EigenmodeEnsemble,
    preset: Preset,
    bits: &[bool],
    seed: u64,
) -> Result<LinkRun> {
    let panel = cfg.panel_for(ensemble)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 6, 0));
    let a = Codebook::random(panel.unit_count, &mut rng);
    let library = (a.clone(), a.complement());
    let lead_in = cfg.detector.calibration_frames + 1;
    let schedule = ppm_encode(bits, &cfg.ppm, &library)?.delayed(lead_in, &a);
    let n_frames = schedule.last_frame() + 2;
    let motion = cfg.motion_for(preset, ensemble)?;
    let x = source_frame(cfg)?;
    let mut real = ChannelRealization::new(
        ensemble.clone(),
        cfg.geometry()?,
        cfg.grid()?,
        cfg.frame_period,
        a,
        sub_seed(seed, 6, 1),
    )?;
    let frames = run_schedule(&mut real, &schedule, &motion, &panel, |_| x.clone(), n_frames, cfg.snr_db)?;
    let trace = detect_pulses(&frames, &cfg.detector)?;
    let decoded = match ppm_decode(&trace.pulse_indices, &cfg.ppm) {
        Ok(d) => Some(d),
        Err(Error::NoStartOfFrame) => None,
        Err(e) => return Err(e),
    };
    Ok(LinkRun {
        sent: bits.to_vec(),
        decoded,
        trace,
        schedule,
        n_frames,
        lead_in,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerReport {
    pub scenario: String,
    pub modulation: String,
    pub bits_sent: usize,
    pub bits_errored: usize,
    pub ber: f64,
    pub erasures: usize,
    pub n_frames: usize,
    /// bits_sent / (n_frames * frame_period), bit/s.
    pub bit_rate: f64,
}

impl BerReport {
    pub fn new(
        scenario: &str,
        modulation: &str,
        bits_sent: usize,
        bits_errored: usize,
        erasures: usize,
        n_frames: usize,
        frame_period: f64,
    ) -> Self {
        BerReport {
            scenario: scenario.to_string(),
            modulation: modulation.to_string(),
            bits_sent,
            bits_errored,
            ber: if bits_sent == 0 { 0.0 } else { bits_errored as f64 / bits_sent as f64 },
            erasures,
            n_frames,
            bit_rate: if n_frames == 0 { 0.0 } else { bits_sent as f64 / (n_frames as f64 * frame_period) },
        }
    }

    fn from_link(scenario: &str, run: &LinkRun, frame_period: f64) -> Self {
        BerReport::new(
            scenario,
            "ppm",
            run.sent.len(),
            run.bit_errors(),
            run.erasures(),
            run.n_frames,
            frame_period,
        )
    }
}

// ------------------------------------------------------------------ BER table

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerTableResult {
    pub reports: Vec<BerReport>,
    /// OFDM BER over symbols after the first codebook switch.
    pub ofdm_post_switch_ber: f64,
}

impl BerTableResult {
    pub fn report(&self, scenario: &str, modulation: &str) -> Option<&BerReport> {
        self.reports
            .iter()
            .find(|r| r.scenario == scenario && r.modulation == modulation)
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut out = b"scenario,modulation,bits_sent,bits_errored,ber,erasures,n_frames,bit_rate_bps\n".to_vec();
        for r in &self.reports {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.scenario, r.modulation, r.bits_sent, r.bits_errored, r.ber, r.erasures, r.n_frames, r.bit_rate
            );
        }
        out
    }
}

/// PPM under every drift preset, plus equalized OFDM sharing the schedule
/// and motion of `ber_table.ofdm_preset`.
pub fn ber_table(cfg: &ExperimentConfig) -> Result<BerTableResult> {
    let seed = cfg.seed();
    let ens = cfg.ensemble(sub_seed(seed, 7, 0))?;
    let bits = random_bits(cfg.ber_table.n_bits, sub_seed(seed, 7, 1));
    let link_seed = sub_seed(seed, 7, 2);
    let mut reports = Vec::new();
    let mut ofdm_schedule = None;
    for preset in Preset::ALL {
        let run = ppm_link(cfg, &ens, preset, &bits, link_seed)?;
        reports.push(BerReport::from_link(preset.label(), &run, cfg.frame_period));
        if preset == cfg.ber_table.ofdm_preset {
            ofdm_schedule = Some((run.schedule.clone(), run.n_frames));
        }
    }
    let (schedule, n_frames) = ofdm_schedule.expect("every preset runs");
    let panel = cfg.panel_for(&ens)?;
    let initial = schedule.entries()[0].1.clone();
    let real = ChannelRealization::new(
        ens.clone(),
        cfg.geometry()?,
        cfg.grid()?,
        cfg.frame_period,
        initial.clone(),
        sub_seed(seed, 7, 3),
    )?;
    let per_symbol = 2 * cfg.grid()?.occupied().len();
    let n_symbols = n_frames.saturating_sub(1);
    let ofdm_bits = random_bits(n_symbols * per_symbol, sub_seed(seed, 7, 4));
    let motion = cfg.motion_for(cfg.ber_table.ofdm_preset, &ens)?;
    let ofdm = ofdm_baseline(&real, &schedule, &motion, &panel, &source_frame(cfg)?, &ofdm_bits, cfg.snr_db)?;
    let first_switch = schedule.switch_frames(&initial).first().copied().unwrap_or(n_frames);
    reports.push(BerReport::new(
        cfg.ber_table.ofdm_preset.label(),
        "ofdm",
        ofdm.bits_sent,
        ofdm.bit_errors,
        0,
        n_frames,
        cfg.frame_period,
    ));
    Ok(BerTableResult {
        reports,
        ofdm_post_switch_ber: ofdm.ber_from_frame(first_switch),
    })
}

pub fn exp_ber_table(cfg: &ExperimentConfig, out: &Path) -> Result<BerTableResult> {
    let r = ber_table(cfg)?;
    write_atomic(out, "ber_table.csv", &r.to_csv())?;
    write_summary(out, "ber-table", cfg, &r)?;
    Ok(r)
}

// ----------------------------------------------------------------- round trip

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundtripResult {
    pub report: BerReport,
    pub bytes_in: usize,
    pub bytes_out: usize,
    pub identical: bool,
    /// Symbol positions whose pulse gap was out of range.
    pub erasure_positions: Vec<usize>,
    #[serde(skip)]
    pub received: Vec<u8>,
    #[serde(skip)]
    pub trace: Option<DetectorTrace>,
}

/// Byte stream through PPM, the cavity and the detector, and back.
pub fn file_roundtrip(cfg: &ExperimentConfig, input: &[u8]) -> Result<RoundtripResult> {
    let seed = cfg.seed();
    let preset = cfg.roundtrip.preset;
    let ens = cfg.ensemble(sub_seed(seed, 8, 0))?;
    let bits = bytes_to_bits(input);
    let run = ppm_link(cfg, &ens, preset, &bits, sub_seed(seed, 8, 1))?;
    let Some(decoded) = &run.decoded else {
        return Err(Error::NoStartOfFrame);
    };
    let received = bits_to_bytes(&decoded.bits);
    Ok(RoundtripResult {
        report: BerReport::from_link(preset.label(), &run, cfg.frame_period),
        bytes_in: input.len(),
        bytes_out: received.len(),
        identical: received == input,
        erasure_positions: decoded.erasures.clone(),
        received,
        trace: Some(run.trace),
    })
}

pub fn exp_file_roundtrip(cfg: &ExperimentConfig, input: &Path, out: &Path) -> Result<RoundtripResult> {
    let data = std::fs::read(input).map_err(io_err(input))?;
    let r = file_roundtrip(cfg, &data)?;
    write_atomic(out, "received.bin", &r.received)?;
    if let Some(trace) = &r.trace {
        let mut csv = Vec::new();
        trace.write_csv(&mut csv)?;
        write_atomic(out, "trace.csv", &csv)?;
    }
    write_summary(out, "roundtrip", cfg, &r)?;
    Ok(r)
}
