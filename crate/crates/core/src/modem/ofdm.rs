//! Equalized OFDM reference link.
//!
//! Every frame slot carries one OFDM symbol with QPSK on the occupied
//! subcarriers. The cyclic prefix is assumed to cover the delay spread, so
//! the channel acts per subcarrier exactly as in [`propagate_frame`]. The
//! receiver estimates the channel once from a known preamble in frame 0 and
//! keeps using that estimate for the rest of the burst.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{advance_channel, propagate_frame, ChannelRealization, CodebookSchedule, Frame, ScattererMotion};
use crate::error::{Error, Result};
use crate::perturbation::RisPanel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfdmReport {
    pub bits_sent: usize,
    pub bit_errors: usize,
    pub ber: f64,
    pub bits_per_symbol: usize,
    /// Bit errors of each data symbol; symbol `i` occupies frame `i + 1`.
    pub symbol_errors: Vec<usize>,
}

impl OfdmReport {
    /// BER over data symbols whose frame index is at least `frame`.
    pub fn ber_from_frame(&self, frame: usize) -> f64 {
        let skip = frame.saturating_sub(1);
        let tail = &self.symbol_errors[skip.min(self.symbol_errors.len())..];
        let bits = tail.len() * self.bits_per_symbol;
        if bits == 0 {
            return 0.0;
        }
        tail.iter().sum::<usize>() as f64 / bits as f64
    }
}

fn qpsk(b0: bool, b1: bool) -> Complex64 {
    let s = |b: bool| if b { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    Complex64::new(s(b0), s(b1))
}

/// Sends `bits` over the evolving channel, one OFDM symbol per frame after
/// the preamble frame, and equalizes every symbol with the frame-0 estimate.
#[allow(clippy::too_many_arguments)]
pub fn ofdm_baseline(
    real: &ChannelRealization,
    schedule: &CodebookSchedule,
    motion: &ScattererMotion,
    panel: &RisPanel,
    preamble: &Frame,
    bits: &[bool],
    snr_db: f64,
) -> Result<OfdmReport> {
    let mut real = real.clone();
    let grid = real.grid;
    let occupied = grid.occupied();
    let per_symbol = 2 * occupied.len();
    if !bits.len().is_multiple_of(per_symbol) {
        return Err(Error::BitAlignment {
            bits: bits.len(),
            bits_per_symbol: per_symbol,
        });
    }
    if preamble.spectrum[occupied.clone()].iter().any(|p| p.norm() == 0.0) {
        return Err(Error::ZeroFrame);
    }

    advance_channel(&mut real, 0, schedule, motion, panel)?;
    let y0 = propagate_frame(&mut real, preamble, snr_db)?;
    let estimate: Vec<Complex64> = occupied
        .clone()
        .map(|k| y0.spectrum[k] / preamble.spectrum[k])
        .collect();

    let mut symbol_errors = Vec::with_capacity(bits.len() / per_symbol);
    for (i, chunk) in bits.chunks(per_symbol).enumerate() {
        let n = i + 1;
        let mut spectrum = vec![Complex64::new(0.0, 0.0); grid.n_bins];
        for (slot, pair) in occupied.clone().zip(chunk.chunks(2)) {
            spectrum[slot] = qpsk(pair[0], pair[1]);
        }
        let x = Frame::new(grid, spectrum, n)?;
        advance_channel(&mut real, n, schedule, motion, panel)?;
        let y = propagate_frame(&mut real, &x, snr_db)?;
        let errors = occupied
            .clone()
            .zip(&estimate)
            .zip(chunk.chunks(2))
            .map(|((k, h), pair)| {
                let z = y.spectrum[k] / h;
                usize::from((z.re < 0.0) != pair[0]) + usize::from((z.im < 0.0) != pair[1])
            })
            .sum();
        symbol_errors.push(errors);
    }
    let bit_errors: usize = symbol_errors.iter().sum();
    Ok(OfdmReport {
        bits_sent: bits.len(),
        bit_errors,
        ber: if bits.is_empty() { 0.0 } else { bit_errors as f64 / bits.len() as f64 },
        bits_per_symbol: per_symbol,
        symbol_errors,
    })
}
