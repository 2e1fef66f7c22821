//! BER of PPM under three drift presets against a stale-equalizer OFDM link.

use cavitylink::harness::{ber_table, ExperimentConfig};

fn main() -> cavitylink::Result<()> {
    let cfg = ExperimentConfig::default().resolve(Some(4))?;
    let r = ber_table(&cfg)?;
    println!("{:<11} {:<5} {:>9} {:>8} {:>12}", "scenario", "mod", "bits", "BER", "rate (b/s)");
    for b in &r.reports {
        println!(
            "{:<11} {:<5} {:>9} {:>8.4} {:>12.0}",
            b.scenario, b.modulation, b.bits_sent, b.ber, b.bit_rate
        );
    }
    println!("OFDM BER after the first switch: {:.4}", r.ofdm_post_switch_ber);
    Ok(())
}
