//! Checks the first-order wall-perturbation formula against an exactly
//! resized rectangular cavity, then maps RIS switches to volume changes.

use std::f64::consts::PI;

use cavitylink::perturbation::{
    codebook_switch_volume, eigenfrequency_shift, equivalent_displacement, rect_mode_frequency, Codebook,
    ModeIndex, RectangularCavity, RisPanel, Wall,
};

fn main() -> cavitylink::Result<()> {
    let cavity = RectangularCavity::vacuum(2.0, 2.0, 4.0)?;
    let te101 = ModeIndex::new(1, 0, 1);
    let w = rect_mode_frequency(te101, &cavity)?;
    println!("TE101 in 2 x 2 x 4 m: {:.4} MHz", w / (2.0 * PI) / 1e6);

    println!("\n{:>10} {:>14} {:>14} {:>9}", "delta (m)", "formula", "resized", "rel err");
    for delta in [1e-3, 2e-3, 4e-3] {
        let shift = eigenfrequency_shift(&cavity, te101, Wall::ZMax, delta)?;
        let mut resized = cavity;
        resized.d -= delta;
        let exact = rect_mode_frequency(te101, &resized)? - w;
        println!(
            "{delta:>10.0e} {:>14.6e} {:>14.6e} {:>8.3}%",
            shift,
            exact,
            100.0 * (shift - exact).abs() / exact.abs()
        );
    }

    let lambda = 0.09;
    println!("\nequivalent displacement of a pi switch at {lambda} m: {:.4} m", equivalent_displacement(PI, lambda)?);
    let panel = RisPanel::new(512, 0.01, PI, lambda, 1.0)?;
    let a = Codebook::zeros(512);
    for flips in [1, 64, 512] {
        let b = Codebook::new((0..512).map(|i| i < flips).collect());
        println!("{flips:>4} units flipped -> {:.3e} m^3", codebook_switch_volume(&a, &b, &panel)?);
    }
    Ok(())
}
