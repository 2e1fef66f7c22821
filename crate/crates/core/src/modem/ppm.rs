//! Gap-coded pulse position modulation over codebook switches.
//!
//! A start pulse opens the burst; each following pulse encodes one symbol of
//! `log2(m_ary)` bits as the number of frames since the previous pulse,
//! `min_gap + symbol`. Only gaps matter, so a constant timing offset between
//! the RIS controller and the receiver does not affect decoding.

use serde::{Deserialize, Serialize};

use crate::channel::CodebookSchedule;
use crate::error::{invalid, Error, Result};
use crate::perturbation::Codebook;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpmConfig {
    pub m_ary: usize,
    pub min_gap: usize,
}

impl Default for PpmConfig {
    fn default() -> Self {
        PpmConfig { m_ary: 4, min_gap: 2 }
    }
}

impl PpmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_ary < 2 || !self.m_ary.is_power_of_two() {
            return Err(invalid("m_ary", format!("must be a power of two >= 2, got {}", self.m_ary)));
        }
        if self.min_gap < 1 {
            return Err(invalid("min_gap", "must be at least 1"));
        }
        Ok(())
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.m_ary.trailing_zeros() as usize
    }

    pub fn max_gap(&self) -> usize {
        self.min_gap + self.m_ary - 1
    }
}

/// Bits recovered from a pulse train, with the symbol positions whose gap
/// fell outside `[min_gap, max_gap]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PpmDecoded {
    pub bits: Vec<bool>,
    pub erasures: Vec<usize>,
}

/// Pulse frames (relative to the start pulse) carrying `bits`.
pub fn ppm_pulse_frames(bits: &[bool], cfg: &PpmConfig) -> Result<Vec<usize>> {
    cfg.validate()?;
    let k = cfg.bits_per_symbol();
    if !bits.len().is_multiple_of(k) {
        return Err(Error::BitAlignment {
            bits: bits.len(),
            bits_per_symbol: k,
        });
    }
    let mut frames = vec![0];
    let mut at = 0;
    for chunk in bits.chunks(k) {
        let symbol = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        at += cfg.min_gap + symbol;
        frames.push(at);
    }
    Ok(frames)
}

/// Encodes `bits` as a toggle schedule between the two library codebooks.
///
/// The RIS is assumed to hold `library.0` before the burst, so the start
/// pulse at frame 0 loads `library.1` and every later pulse flips back.
pub fn ppm_encode(bits: &[bool], cfg: &PpmConfig, library: &(Codebook, Codebook)) -> Result<CodebookSchedule> {
    if library.0.len() != library.1.len() {
        return Err(Error::CodebookLength {
            left: library.0.len(),
            right: library.1.len(),
        });
    }
    let frames = ppm_pulse_frames(bits, cfg)?;
    let entries = frames
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            let cb = if i % 2 == 0 { &library.1 } else { &library.0 };
            (f, cb.clone())
        })
        .collect();
    CodebookSchedule::new(entries)
}

/// Maps pulse gaps back to bits.
pub fn ppm_decode(pulse_indices: &[usize], cfg: &PpmConfig) -> Result<PpmDecoded> {
    cfg.validate()?;
    if pulse_indices.is_empty() {
        return Err(Error::NoStartOfFrame);
    }
    let k = cfg.bits_per_symbol();
    let mut bits = Vec::with_capacity((pulse_indices.len() - 1) * k);
    let mut erasures = Vec::new();
    for (i, w) in pulse_indices.windows(2).enumerate() {
        let gap = w[1] - w[0];
        let symbol = if gap < cfg.min_gap {
            erasures.push(i);
            0
        } else if gap > cfg.max_gap() {
            erasures.push(i);
            cfg.m_ary - 1
        } else {
            gap - cfg.min_gap
        };
        bits.extend((0..k).rev().map(|s| (symbol >> s) & 1 == 1));
    }
    Ok(PpmDecoded { bits, erasures })
}

/// Most significant bit first.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|b| (0..8).rev().map(move |s| (b >> s) & 1 == 1))
        .collect()
}

/// Packs bits MSB first; a trailing partial byte is dropped.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks_exact(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b)))
        .collect()
}
