//! Monte Carlo sweep driver.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error,
//! 3 more than 10% failed trials at some grid point.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mmwave_icc::sim::{self, parse_list, ExperimentConfig, Mode};
use mmwave_icc::Error;

#[derive(Debug, Parser)]
#[command(name = "simulate", version, about = "Sweep BER and NMSE of the joint receiver over SNR and velocity")]
struct Args {
    /// TOML configuration; missing keys take their defaults.
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated SNR values in dB.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Comma-separated velocities in km/h.
    #[arg(long)]
    velocity: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of full, genie-channel, genie-symbols, genie-both.
    #[arg(long)]
    modes: Option<String>,
    #[arg(long, default_value = "results.csv")]
    output: PathBuf,
    /// Also write a matplotlib script that plots the CSV.
    #[arg(long)]
    emit_plot_script: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Record per-point wall time in the CSV (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

fn configure(args: &Args) -> mmwave_icc::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(s) = &args.snr {
        cfg.sweep.snr_db = parse_list(s)?;
    }
    if let Some(v) = &args.velocity {
        cfg.sweep.velocity_kmh = parse_list(v)?;
    }
    if let Some(t) = args.trials {
        cfg.sweep.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.sweep.seed = s;
    }
    if let Some(m) = &args.modes {
        cfg.sweep.modes = parse_list::<Mode>(m)?;
    }
    if args.threads == Some(0) {
        return Err(Error::config("--threads must be positive"));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: &Args) -> mmwave_icc::Result<bool> {
    let cfg = configure(args)?;
    let records = mmwave_icc::par::with_threads(args.threads, || sim::run_sweep(&cfg))??;
    sim::write_csv(&args.output, &records, args.timing)?;
    if let Some(path) = &args.emit_plot_script {
        sim::write_plot_script(path, &args.output)?;
    }
    Ok(sim::failure_budget_exceeded(&records))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("error: more than 10% of trials failed numerically at some grid point; see {}", args.output.display());
            ExitCode::from(3)
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
