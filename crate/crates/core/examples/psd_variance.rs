//! PSD change variance grows with the number of flipped RIS units.

use cavitylink::harness::{psd_variance, ExperimentConfig};

fn main() -> cavitylink::Result<()> {
    let mut cfg = ExperimentConfig::default().resolve(Some(11))?;
    cfg.psd_variance.n_seeds = 10;
    let r = psd_variance(&cfg)?;
    println!("{:>6} {:>10} {:>8}", "flips", "variance", "sem");
    for p in &r.points {
        println!("{:>6} {:>10.4} {:>8.4}", p.units_flipped, p.psd_variance, p.psd_variance_sem);
    }
    println!("pearson(flips, variance) = {:.3}", r.pearson);
    Ok(())
}
