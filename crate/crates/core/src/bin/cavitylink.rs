use std::path::PathBuf;
use std::process::ExitCode;

use cavitylink::harness::{
    exp_ber_table, exp_file_roundtrip, exp_psd_variance, exp_three_scenarios, exp_two_codebooks, ExperimentConfig,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cavitylink", version, about = "Reconfigurable-boundary modulation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration; defaults apply to anything omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the one in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// PSD change variance against the number of flipped units.
    PsdVariance(Common),
    /// Received PSD under two random codebooks.
    TwoCodebooks(Common),
    /// Switch-only, drift-only and drift-plus-switch detector traces.
    ThreeScenarios(Common),
    /// PPM under three drift presets and the OFDM baseline.
    BerTable(Common),
    /// Sends a file through the simulated link.
    Roundtrip {
        #[command(flatten)]
        common: Common,
        /// File to transmit.
        #[arg(long)]
        input: PathBuf,
    },
}

fn load(c: &Common) -> cavitylink::Result<ExperimentConfig> {
    let cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    cfg.resolve(c.seed)
}

fn run(cli: Cli) -> cavitylink::Result<String> {
    Ok(match cli.command {
        Command::PsdVariance(c) => {
            let r = exp_psd_variance(&load(&c)?, &c.out)?;
            format!("psd-variance: pearson {:.4}", r.pearson)
        }
        Command::TwoCodebooks(c) => {
            let r = exp_two_codebooks(&load(&c)?, &c.out)?;
            format!(
                "two-codebooks: distance {:.4}, noise baseline {:.4}",
                r.l2_distance, r.noise_baseline
            )
        }
        Command::ThreeScenarios(c) => {
            let r = exp_three_scenarios(&load(&c)?, &c.out)?;
            r.scenarios
                .iter()
                .map(|s| format!("{}: pulses {:?} (expected {:?})", s.name, s.pulse_indices, s.expected))
                .collect::<Vec<_>>()
                .join("\n")
        }
        Command::BerTable(c) => {
            let r = exp_ber_table(&load(&c)?, &c.out)?;
            r.reports
                .iter()
                .map(|b| format!("{} {}: BER {:.4} ({} / {})", b.scenario, b.modulation, b.ber, b.bits_errored, b.bits_sent))
                .collect::<Vec<_>>()
                .join("\n")
        }
        Command::Roundtrip { common, input } => {
            let r = exp_file_roundtrip(&load(&common)?, &input, &common.out)?;
            format!(
                "roundtrip: {} -> {} bytes, identical {}, BER {:.4}",
                r.bytes_in, r.bytes_out, r.identical, r.report.ber
            )
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("cavitylink: error: {e}");
            ExitCode::FAILURE
        }
    }
}
