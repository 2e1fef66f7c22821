//! Frame-indexed cavity channel.
//!
//! The channel is frozen inside a frame and changes between frames, either
//! continuously (scatterer drift, a Gaussian random walk of the eigenmodes)
//! or abruptly (an RIS codebook switch). A received frame is the transmitted
//! spectrum multiplied bin by bin with the cavity transfer function plus
//! complex white Gaussian noise.

use std::io::{Read, Write};
use std::ops::Range;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::eigenmode::{transfer_function, CavityGeometry, EigenmodeEnsemble};
use crate::error::{invalid, Error, Result};
use crate::perturbation::{perturb_ensemble, Codebook, RisPanel};

/// Baseband frequency grid shared by every frame of a link.
///
/// Bin `k` sits at `(k - N/2) * sample_rate / N` Hz relative to the centre
/// frequency, so bins run from `-sample_rate/2` upwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameGrid {
    pub n_bins: usize,
    pub sample_rate: f64,
    pub center_frequency: f64,
    /// Occupied bandwidth around the centre, Hz.
    pub bandwidth: f64,
}

impl FrameGrid {
    pub fn new(n_bins: usize, sample_rate: f64, center_frequency: f64, bandwidth: f64) -> Result<Self> {
        if n_bins == 0 {
            return Err(invalid("n_bins", "must be positive"));
        }
        if !(sample_rate > 0.0) || !(center_frequency > 0.0) {
            return Err(invalid("sample_rate", "sample rate and centre frequency must be positive"));
        }
        if !(bandwidth > 0.0 && bandwidth <= sample_rate) {
            return Err(invalid(
                "bandwidth",
                format!("need 0 < bandwidth <= sample_rate, got {bandwidth}"),
            ));
        }
        Ok(FrameGrid {
            n_bins,
            sample_rate,
            center_frequency,
            bandwidth,
        })
    }

    pub fn bin_spacing(&self) -> f64 {
        self.sample_rate / self.n_bins as f64
    }

    /// Baseband offset of bin `k`, Hz.
    pub fn offset_hz(&self, k: usize) -> f64 {
        (k as f64 - (self.n_bins / 2) as f64) * self.bin_spacing()
    }

    /// Bins whose offset lies within half the bandwidth of the centre.
    pub fn occupied(&self) -> Range<usize> {
        let half = 0.5 * self.bandwidth * (1.0 + 1e-12);
        let first = (0..self.n_bins).find(|&k| self.offset_hz(k) >= -half).unwrap_or(0);
        let last = (0..self.n_bins)
            .rev()
            .find(|&k| self.offset_hz(k) <= half)
            .unwrap_or(0);
        first..last + 1
    }

    /// Absolute angular frequency of every bin, rad/s.
    pub fn omega_grid(&self) -> Vec<f64> {
        (0..self.n_bins)
            .map(|k| std::f64::consts::TAU * (self.center_frequency + self.offset_hz(k)))
            .collect()
    }

    /// Angular band covering the occupied bandwidth widened by `margin` (0.25
    /// means 25% wider) so Lorentzian tails near the edges are represented.
    pub fn mode_band(&self, margin: f64) -> (f64, f64) {
        let half = 0.5 * self.bandwidth * (1.0 + margin);
        let tau = std::f64::consts::TAU;
        (tau * (self.center_frequency - half), tau * (self.center_frequency + half))
    }
}

/// One frame slot of baseband spectrum samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub grid: FrameGrid,
    pub spectrum: Vec<Complex64>,
    pub frame_index: usize,
}

impl Frame {
    pub fn new(grid: FrameGrid, spectrum: Vec<Complex64>, frame_index: usize) -> Result<Self> {
        if spectrum.len() != grid.n_bins {
            return Err(Error::GridMismatch(format!(
                "spectrum has {} bins, grid has {}",
                spectrum.len(),
                grid.n_bins
            )));
        }
        Ok(Frame {
            grid,
            spectrum,
            frame_index,
        })
    }

    pub fn sample_rate(&self) -> f64 {
        self.grid.sample_rate
    }

    pub fn center_frequency(&self) -> f64 {
        self.grid.center_frequency
    }

    /// Power spectrum `|Y|^2` of the occupied bins.
    pub fn occupied_power(&self) -> Vec<f64> {
        self.spectrum[self.grid.occupied()]
            .iter()
            .map(|v| v.norm_sqr())
            .collect()
    }
}

/// Current state of an evolving cavity channel.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub ensemble: EigenmodeEnsemble,
    pub geom: CavityGeometry,
    /// Frame period, s.
    pub delta_t: f64,
    pub grid: FrameGrid,
    /// Codebook currently loaded on the RIS.
    pub codebook: Codebook,
    rng: ChaCha8Rng,
    omega: Vec<f64>,
}

impl ChannelRealization {
    pub fn new(
        ensemble: EigenmodeEnsemble,
        geom: CavityGeometry,
        grid: FrameGrid,
        delta_t: f64,
        codebook: Codebook,
        seed: u64,
    ) -> Result<Self> {
        if !(delta_t > 0.0 && delta_t.is_finite()) {
            return Err(invalid("delta_t", format!("must be positive, got {delta_t}")));
        }
        Ok(ChannelRealization {
            ensemble,
            geom,
            delta_t,
            omega: grid.omega_grid(),
            grid,
            codebook,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Transfer function on the frame grid.
    pub fn transfer(&self) -> Vec<Complex64> {
        transfer_function(&self.ensemble, &self.geom, &self.omega)
    }

    /// Draws a sub-seed from the realization's own generator.
    pub fn next_seed(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// Per-frame random walk of the scattering boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScattererMotion {
    /// Std of the per-frame eigenfrequency step, rad/s.
    pub drift_rate: f64,
    /// Std of the per-frame phase step, rad.
    pub phase_drift_rate: f64,
    pub enabled: bool,
}

impl ScattererMotion {
    pub fn new(drift_rate: f64, phase_drift_rate: f64) -> Result<Self> {
        for (name, v) in [("drift_rate", drift_rate), ("phase_drift_rate", phase_drift_rate)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be finite and non-negative, got {v}")));
            }
        }
        Ok(ScattererMotion {
            drift_rate,
            phase_drift_rate,
            enabled: true,
        })
    }

    pub fn disabled() -> Self {
        ScattererMotion {
            drift_rate: 0.0,
            phase_drift_rate: 0.0,
            enabled: false,
        }
    }

    fn is_still(&self) -> bool {
        !self.enabled || (self.drift_rate == 0.0 && self.phase_drift_rate == 0.0)
    }
}

/// Advances the scatterers by one frame.
pub fn evolve_scatterer(real: &ChannelRealization, motion: &ScattererMotion) -> ChannelRealization {
    let mut next = real.clone();
    drift_in_place(&mut next, motion);
    next
}

fn drift_in_place(real: &mut ChannelRealization, motion: &ScattererMotion) {
    if motion.is_still() {
        return;
    }
    // both rates were validated as finite and non-negative
    let step = Normal::new(0.0, motion.drift_rate).expect("validated drift rate");
    let turn = Normal::new(0.0, motion.phase_drift_rate).expect("validated phase rate");
    let modes = real
        .ensemble
        .modes()
        .iter()
        .map(|m| {
            let mut m = *m;
            m.omega += step.sample(&mut real.rng);
            m.phi += turn.sample(&mut real.rng);
            m
        })
        .collect();
    real.ensemble = real.ensemble.with_modes_clamped(modes);
}

/// Switches the RIS from `cb_prev` to `cb_next`.
pub fn apply_codebook_switch(
    real: &ChannelRealization,
    cb_prev: &Codebook,
    cb_next: &Codebook,
    panel: &RisPanel,
) -> Result<ChannelRealization> {
    let mut next = real.clone();
    switch_in_place(&mut next, cb_prev, cb_next, panel)?;
    Ok(next)
}

fn switch_in_place(
    real: &mut ChannelRealization,
    cb_prev: &Codebook,
    cb_next: &Codebook,
    panel: &RisPanel,
) -> Result<()> {
    if cb_prev.hamming(cb_next)? > 0 {
        let seed = real.rng.next_u64();
        real.ensemble = perturb_ensemble(&real.ensemble, cb_prev, cb_next, panel, seed)?;
    }
    real.codebook = cb_next.clone();
    Ok(())
}

fn check_grid(real: &ChannelRealization, x: &Frame) -> Result<()> {
    if x.grid != real.grid || x.spectrum.len() != real.grid.n_bins {
        return Err(Error::GridMismatch(format!(
            "frame grid {:?} does not match channel grid {:?}",
            x.grid, real.grid
        )));
    }
    Ok(())
}

/// `Y = H X + noise`, with the noise power set so the average SNR over the
/// occupied bins equals `snr_db`. An infinite SNR disables the noise.
pub fn propagate_frame(real: &mut ChannelRealization, x: &Frame, snr_db: f64) -> Result<Frame> {
    check_grid(real, x)?;
    let mut y = noiseless(real, x);
    if snr_db.is_finite() {
        let occupied = real.grid.occupied();
        let n_occ = occupied.len() as f64;
        let signal = y[occupied].iter().map(|v| v.norm_sqr()).sum::<f64>() / n_occ;
        add_noise(&mut real.rng, &mut y, signal / 10f64.powf(snr_db / 10.0));
    } else if snr_db.is_nan() {
        return Err(invalid("snr_db", "must not be NaN"));
    }
    Frame::new(real.grid, y, x.frame_index)
}

/// Like [`propagate_frame`] but with an absolute per-bin noise power.
pub fn propagate_frame_with_noise_power(
    real: &mut ChannelRealization,
    x: &Frame,
    noise_power: f64,
) -> Result<Frame> {
    check_grid(real, x)?;
    if !(noise_power >= 0.0 && noise_power.is_finite()) {
        return Err(invalid("noise_power", "must be finite and non-negative"));
    }
    let mut y = noiseless(real, x);
    add_noise(&mut real.rng, &mut y, noise_power);
    Frame::new(real.grid, y, x.frame_index)
}

fn noiseless(real: &ChannelRealization, x: &Frame) -> Vec<Complex64> {
    real.transfer()
        .into_iter()
        .zip(&x.spectrum)
        .map(|(h, x)| h * x)
        .collect()
}

fn add_noise(rng: &mut ChaCha8Rng, y: &mut [Complex64], power: f64) {
    if power == 0.0 {
        return;
    }
    let dist = Normal::new(0.0, (power / 2.0).sqrt()).expect("finite noise power");
    for v in y.iter_mut() {
        *v += Complex64::new(dist.sample(rng), dist.sample(rng));
    }
}

/// Timed sequence of codebooks loaded on the RIS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookSchedule {
    entries: Vec<(usize, Codebook)>,
}

impl CodebookSchedule {
    /// Frame indices must start at 0 and increase strictly.
    pub fn new(entries: Vec<(usize, Codebook)>) -> Result<Self> {
        match entries.first() {
            None => return Err(Error::Schedule("schedule is empty".into())),
            Some((0, _)) => {}
            Some((f, _)) => return Err(Error::Schedule(format!("first entry at frame {f}, expected 0"))),
        }
        if let Some(w) = entries.windows(2).find(|w| w[0].0 >= w[1].0) {
            return Err(Error::Schedule(format!(
                "frame indices must increase strictly, got {} then {}",
                w[0].0, w[1].0
            )));
        }
        Ok(CodebookSchedule { entries })
    }

    /// A single codebook held for the whole run.
    pub fn constant(codebook: Codebook) -> Self {
        CodebookSchedule {
            entries: vec![(0, codebook)],
        }
    }

    /// Alternates between `a` and `b` at each of `frames`, starting from `a`
    /// at frame 0.
    pub fn toggling(a: &Codebook, b: &Codebook, frames: &[usize]) -> Result<Self> {
        let mut entries = vec![(0, a.clone())];
        let mut current_is_a = true;
        for &f in frames {
            current_is_a = !current_is_a;
            let cb = if current_is_a { a } else { b };
            if f == 0 {
                entries[0] = (0, cb.clone());
            } else {
                entries.push((f, cb.clone()));
            }
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[(usize, Codebook)] {
        &self.entries
    }

    pub fn frames(&self) -> Vec<usize> {
        self.entries.iter().map(|(f, _)| *f).collect()
    }

    pub fn last_frame(&self) -> usize {
        self.entries.last().map(|(f, _)| *f).unwrap_or(0)
    }

    /// Shifts every entry by `lead_in` frames and holds `initial` before
    /// them.
    pub fn delayed(&self, lead_in: usize, initial: &Codebook) -> Self {
        if lead_in == 0 {
            return self.clone();
        }
        let mut entries = vec![(0, initial.clone())];
        entries.extend(self.entries.iter().map(|(f, cb)| (f + lead_in, cb.clone())));
        CodebookSchedule { entries }
    }

    /// Frames at which the loaded codebook actually changes, given the
    /// codebook held before frame 0.
    pub fn switch_frames(&self, initial: &Codebook) -> Vec<usize> {
        let mut current = initial;
        let mut out = Vec::new();
        for (f, cb) in &self.entries {
            if cb != current {
                out.push(*f);
            }
            current = cb;
        }
        out
    }
}

/// Steps the channel into frame `n`: scatterer drift, then the scheduled
/// codebook switch if one falls on `n`.
pub fn advance_channel(
    real: &mut ChannelRealization,
    n: usize,
    schedule: &CodebookSchedule,
    motion: &ScattererMotion,
    panel: &RisPanel,
) -> Result<()> {
    drift_in_place(real, motion);
    if let Ok(pos) = schedule.entries.binary_search_by_key(&n, |(f, _)| *f) {
        let prev = real.codebook.clone();
        switch_in_place(real, &prev, &schedule.entries[pos].1, panel)?;
    }
    Ok(())
}

/// Runs `n_frames` frames of an invariant source through the evolving
/// channel.
///
/// The source is called once per frame and must return the same spectrum
/// every time; any deviation is rejected, since only boundary changes may
/// alter the received frames.
pub fn run_schedule<S>(
    real: &mut ChannelRealization,
    schedule: &CodebookSchedule,
    motion: &ScattererMotion,
    panel: &RisPanel,
    mut source: S,
    n_frames: usize,
    snr_db: f64,
) -> Result<Vec<Frame>>
where
    S: FnMut(usize) -> Frame,
{
    if schedule.last_frame() >= n_frames && n_frames > 0 {
        return Err(Error::ScheduleBeyondRun {
            frame: schedule.last_frame(),
            n_frames,
        });
    }
    let mut out = Vec::with_capacity(n_frames);
    let mut reference: Option<Vec<Complex64>> = None;
    for n in 0..n_frames {
        let mut x = source(n);
        match &reference {
            None => reference = Some(x.spectrum.clone()),
            Some(r) if *r != x.spectrum => return Err(Error::SourceVariance { frame: n }),
            Some(_) => {}
        }
        x.frame_index = n;
        advance_channel(real, n, schedule, motion, panel)?;
        out.push(propagate_frame(real, &x, snr_db)?);
    }
    Ok(out)
}

fn check_sequence(frames: &[Frame]) -> Result<Option<FrameGrid>> {
    let Some(first) = frames.first() else {
        return Ok(None);
    };
    if let Some(f) = frames.iter().find(|f| f.grid != first.grid) {
        return Err(Error::GridMismatch(format!(
            "frame {} uses a different grid",
            f.frame_index
        )));
    }
    Ok(Some(first.grid))
}

/// Writes `frame_index,bin_index,re,im` rows with a header.
pub fn write_frames_csv<W: Write>(mut w: W, frames: &[Frame]) -> Result<()> {
    check_sequence(frames)?;
    writeln!(w, "frame_index,bin_index,re,im")?;
    for f in frames {
        for (k, v) in f.spectrum.iter().enumerate() {
            writeln!(w, "{},{},{},{}", f.frame_index, k, v.re, v.im)?;
        }
    }
    Ok(())
}

/// Compact little-endian record: `u32 N`, `u32 n_frames`, `f64 sample_rate`,
/// then `re, im` as `f32` pairs, frame by frame.
pub fn write_frames_binary<W: Write>(mut w: W, frames: &[Frame]) -> Result<()> {
    let grid = check_sequence(frames)?;
    let (n, fs) = grid.map(|g| (g.n_bins, g.sample_rate)).unwrap_or((0, 0.0));
    let as_u32 = |v: usize, name: &'static str| u32::try_from(v).map_err(|_| invalid(name, "exceeds u32"));
    w.write_u32::<LittleEndian>(as_u32(n, "n_bins")?)?;
    w.write_u32::<LittleEndian>(as_u32(frames.len(), "n_frames")?)?;
    w.write_f64::<LittleEndian>(fs)?;
    for f in frames {
        for v in &f.spectrum {
            w.write_f32::<LittleEndian>(v.re as f32)?;
            w.write_f32::<LittleEndian>(v.im as f32)?;
        }
    }
    Ok(())
}

/// Decoded binary record: `(sample_rate, spectra)`.
pub fn read_frames_binary<R: Read>(mut r: R) -> Result<(f64, Vec<Vec<Complex64>>)> {
    let n = r.read_u32::<LittleEndian>()? as usize;
    let n_frames = r.read_u32::<LittleEndian>()? as usize;
    let fs = r.read_f64::<LittleEndian>()?;
    let mut out = Vec::with_capacity(n_frames);
    for _ in 0..n_frames {
        let mut spectrum = Vec::with_capacity(n);
        for _ in 0..n {
            let re = r.read_f32::<LittleEndian>()? as f64;
            let im = r.read_f32::<LittleEndian>()? as f64;
            spectrum.push(Complex64::new(re, im));
        }
        out.push(spectrum);
    }
    Ok((fs, out))
}
