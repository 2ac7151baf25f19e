use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rrfilt::harness::{run_experiment, snr_sweep, write_csv, write_sweep_csv, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "rrfilt",
    version,
    about = "Reduced-rank JIDF filters and DS-CDMA BER experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one Monte-Carlo experiment and write the per-symbol CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat the experiment over a list of SNR values (dB).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        snr: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print additions and multiplications per symbol for the configured scheme.
    Complexity {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> rrfilt::Result<()> {
    match cli.command {
        Command::Run { config, seed, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let rec = run_experiment(&cfg)?;
            let path = out
                .or(cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from("results.csv"));
            write_csv(&rec, &path)?;
            eprintln!(
                "{}: final BER {:.6}, mean MSE {:.6}, runs {} (diverged {}), {:.2?} -> {}",
                rec.scheme,
                rec.final_ber,
                rec.mean_mse(),
                rec.runs_used,
                rec.runs_diverged,
                rec.wall_time,
                path.display()
            );
        }
        Command::Sweep {
            config,
            snr,
            out,
            seed,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let recs = snr_sweep(&cfg, &snr)?;
            write_sweep_csv(&recs, &out)?;
            for r in &recs {
                eprintln!("{} dB: BER {:.6}", r.snr_db, r.final_ber);
            }
        }
        Command::Complexity { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let c = cfg.complexity()?;
            println!("scheme,additions,multiplications");
            println!("{},{},{}", cfg.scheme, c.additions, c.multiplications);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
