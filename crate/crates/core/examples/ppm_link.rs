//! Sends a text message with gap-coded PPM through a drifting cavity.
//!
//! `cargo run --example ppm_link -- "message" [stationary|walking|running]`

use cavitylink::harness::{ppm_link, ExperimentConfig, Preset};
use cavitylink::modem::{bits_to_bytes, bytes_to_bits};

fn main() -> cavitylink::Result<()> {
    let mut args = std::env::args().skip(1);
    let message = args.next().unwrap_or_else(|| "hello, cavity".to_string());
    let preset = match args.next().as_deref() {
        None | Some("walking") => Preset::Walking,
        Some("stationary") => Preset::Stationary,
        Some("running") => Preset::Running,
        Some(other) => panic!("unknown preset {other}"),
    };
    let cfg = ExperimentConfig::default().resolve(Some(2))?;
    let ens = cfg.ensemble(7)?;
    let bits = bytes_to_bits(message.as_bytes());
    let run = ppm_link(&cfg, &ens, preset, &bits, 8)?;

    println!("{} bits over {} frames ({} lead-in)", bits.len(), run.n_frames, run.lead_in);
    println!("first pulses: {:?}", &run.trace.pulse_indices[..run.trace.pulse_indices.len().min(8)]);
    let received = run.decoded.as_ref().map(|d| bits_to_bytes(&d.bits)).unwrap_or_default();
    println!("received: {:?}", String::from_utf8_lossy(&received));
    println!("bit errors: {}, erasures: {}", run.bit_errors(), run.erasures());
    Ok(())
}
