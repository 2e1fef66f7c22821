//! Samples a cavity mode ensemble and inspects its spectrum.
//!
//! `cargo run --example eigenmode_spectrum -- [volume_m3] [seed]`

use std::f64::consts::TAU;

use cavitylink::eigenmode::{
    critical_volume_ratio, mode_count, sample_ensemble, transfer_function, CavityGeometry,
};

fn main() -> cavitylink::Result<()> {
    let mut args = std::env::args().skip(1);
    let volume: f64 = args.next().map_or(0.1, |v| v.parse().expect("volume"));
    let seed: u64 = args.next().map_or(1, |v| v.parse().expect("seed"));

    let f0 = 3.3e9;
    let geom = CavityGeometry::from_center_frequency(volume, 0.15e-6, 1.0, f0)?;
    let w0 = TAU * f0;
    let (lo, hi) = (w0 - TAU * 100e6, w0 + TAU * 100e6);
    let ens = sample_ensemble(seed, &geom, lo, hi, 1.0)?;

    println!("cavity {volume} m^3 at {:.2} GHz (lambda {:.4} m)", f0 / 1e9, geom.lambda);
    println!("modes below f0 (Weyl): {:.0}", mode_count(w0, volume));
    println!(
        "critical volume change: {:.3e} m^3",
        critical_volume_ratio(geom.lambda, volume) * volume
    );
    println!("modes in 200 MHz band: {}", ens.n_m());
    println!("mean spacing: {:.3} MHz", ens.mean_spacing() / TAU / 1e6);
    println!("linewidth 1/(2 pi tau): {:.3} MHz", 1.0 / (TAU * geom.tau) / 1e6);

    let grid: Vec<f64> = (0..41).map(|k| w0 + TAU * (k as f64 - 20.0) * 0.25e6).collect();
    let h = transfer_function(&ens, &geom, &grid);
    let peak = h.iter().map(|v| v.norm()).fold(0.0, f64::max);
    println!("\n|H| around f0 (0.25 MHz steps):");
    for (w, v) in grid.iter().zip(&h) {
        let bar = "#".repeat((40.0 * v.norm() / peak).round() as usize);
        println!("{:+6.2} MHz {bar}", (w - w0) / TAU / 1e6);
    }
    Ok(())
}
