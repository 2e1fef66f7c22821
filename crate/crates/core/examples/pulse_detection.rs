//! DTW pulse detector on switch-only, drift-only and drift-plus-switch runs.

use cavitylink::harness::{three_scenarios, ExperimentConfig};

fn main() -> cavitylink::Result<()> {
    let cfg = ExperimentConfig::default().resolve(Some(5))?;
    let r = three_scenarios(&cfg)?;
    for s in &r.scenarios {
        println!("{:<17} eta {:7.3}  pulses {:?}  expected {:?}", s.name, s.eta, s.pulse_indices, s.expected);
        if let Some(trace) = &s.trace {
            let line: String = trace
                .distances
                .iter()
                .map(|d| match d / trace.eta {
                    x if x >= 1.0 => '|',
                    x if x >= 0.5 => '.',
                    _ => ' ',
                })
                .collect();
            println!("  [{line}]");
        }
    }
    Ok(())
}
