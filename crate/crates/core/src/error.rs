use std::path::PathBuf;

/// Errors produced by the channel model, the transceiver and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("band too narrow for Weyl count: {expected:.3} modes expected in band")]
    BandTooNarrow { expected: f64 },

    #[error("nonexistent mode ({m}, {n}, {p})")]
    NonexistentMode { m: u32, n: u32, p: u32 },

    #[error("field formulas only cover the TE_m0p family, got ({m}, {n}, {p})")]
    UnsupportedMode { m: u32, n: u32, p: u32 },

    #[error("point ({x}, {y}, {z}) lies outside the cavity")]
    OutsideCavity { x: f64, y: f64, z: f64 },

    #[error("wall displacement {displacement} m outside first-order validity range [0, {limit}] m")]
    DisplacementOutOfRange { displacement: f64, limit: f64 },

    #[error("codebook length mismatch: {left} vs {right} units")]
    CodebookLength { left: usize, right: usize },

    #[error("invalid codebook hex string: {0}")]
    CodebookHex(String),

    #[error("invalid codebook schedule: {0}")]
    Schedule(String),

    #[error("schedule switches at frame {frame} but only {n_frames} frames are simulated")]
    ScheduleBeyondRun { frame: usize, n_frames: usize },

    #[error("frame grid mismatch: {0}")]
    GridMismatch(String),

    #[error("frame source is not invariant: frame {frame} differs from frame 0")]
    SourceVariance { frame: usize },

    #[error("cannot normalize an all-zero frame")]
    ZeroFrame,

    #[error("empty sequence passed to DTW")]
    EmptySequence,

    #[error("Sakoe-Chiba band of half-width {window} admits no path between lengths {len_a} and {len_b}")]
    BandTooNarrowForDtw {
        window: usize,
        len_a: usize,
        len_b: usize,
    },

    #[error("pulse detection needs at least 2 frames, got {0}")]
    TooFewFrames(usize),

    #[error("bit count {bits} is not a multiple of {bits_per_symbol}")]
    BitAlignment { bits: usize, bits_per_symbol: usize },

    #[error("no start of frame: detector found no pulses")]
    NoStartOfFrame,

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Stream(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
