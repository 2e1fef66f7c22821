//! Reconfigurable-boundary modulation in reverberant cavities.
//!
//! The crate simulates the radio channel inside a metallic enclosure from its
//! eigenmode statistics, treats RIS codebook switches as boundary
//! perturbations of that channel, and runs a pulse-position link on top of
//! it: a fixed LFM frame is radiated continuously, the RIS toggles codebooks
//! at information-bearing instants, and the receiver spots the switches as
//! abrupt frame-to-frame changes of the received spectrum.
//!
//! - [`eigenmode`]: mode responses, Weyl counting and ensemble sampling
//! - [`perturbation`]: rectangular-cavity perturbation check and the
//!   codebook-to-perturbation mapping
//! - [`channel`]: frame-indexed channel with drift, switches and noise
//! - [`modem`]: LFM source, DTW detector, PPM and the OFDM baseline
//! - [`harness`]: configurable experiments with CSV/JSON outputs
//!
//! Runnable walkthroughs live in `examples/`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod eigenmode;
pub mod error;
pub mod harness;
pub mod modem;
pub mod perturbation;

pub use error::{Error, Result};
