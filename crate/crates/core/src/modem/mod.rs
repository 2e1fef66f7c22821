//! Transceiver: LFM source, DTW pulse detector, gap-coded PPM and the OFDM
//! reference link.

pub mod detector;
pub mod dtw;
pub mod lfm;
pub mod ofdm;
pub mod ppm;

pub use detector::{
    calibrate_threshold, detect_pulses, frame_distance, normalize_spectrum, DetectorTrace, PulseDetectorConfig,
};
pub use dtw::dtw_distance;
pub use lfm::{lfm_frame, lfm_waveform, LfmConfig};
pub use ofdm::{ofdm_baseline, OfdmReport};
pub use ppm::{bits_to_bytes, bytes_to_bits, ppm_decode, ppm_encode, ppm_pulse_frames, PpmConfig, PpmDecoded};
