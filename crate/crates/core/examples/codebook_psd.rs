//! Received PSD of the LFM frame under two random RIS codebooks.
//!
//! `cargo run --example codebook_psd -- [seed]`

use cavitylink::harness::{two_codebooks, ExperimentConfig};

fn main() -> cavitylink::Result<()> {
    let seed = std::env::args().nth(1).map_or(3, |s| s.parse().expect("seed"));
    let cfg = ExperimentConfig::default().resolve(Some(seed))?;
    let r = two_codebooks(&cfg)?;
    let hex = r.codebook_a.to_hex();
    println!("codebook A: {}...", &hex[..32]);
    println!("codebook B: {}...", &r.codebook_b.to_hex()[..32]);
    println!("hamming distance: {} of {}", r.hamming, r.codebook_a.len());
    println!("relative L2 PSD distance: {:.3}", r.l2_distance);
    println!("noise-only baseline:      {:.3}", r.noise_baseline);
    println!("\n{:>10}  {:>8} {:>8}", "MHz", "A", "B");
    for i in (0..r.psd_a.len()).step_by(16) {
        println!(
            "{:>10.2}  {:>8.3} {:>8.3}",
            r.frequency_hz[i] / 1e6,
            r.psd_a[i],
            r.psd_b[i]
        );
    }
    Ok(())
}
