//! Transmits a file through the simulated link and writes what arrives.
//!
//! `cargo run --release --example file_roundtrip -- <input> <output>`
//! Without arguments a 256-byte pattern is sent and nothing is written.

use cavitylink::harness::{file_roundtrip, ExperimentConfig};

fn main() -> cavitylink::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let data = match args.first() {
        Some(p) => std::fs::read(p)?,
        None => (0..=255u8).collect(),
    };
    let cfg = ExperimentConfig::default().resolve(Some(1))?;
    let r = file_roundtrip(&cfg, &data)?;
    if let Some(out) = args.get(1) {
        std::fs::write(out, &r.received)?;
    }
    println!(
        "{} bytes in, {} bytes out, identical: {}, BER {:.4}, {:.0} bit/s",
        r.bytes_in, r.bytes_out, r.identical, r.report.ber, r.report.bit_rate
    );
    Ok(())
}
