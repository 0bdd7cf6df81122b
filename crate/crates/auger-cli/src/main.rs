use auger_cli::runner;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Four-level Auger photoemission model: batch simulations, sweeps, and
/// spectra from flat key-value configs.
#[derive(Parser)]
#[command(name = "auger", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Key-value config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the population rate equations.
    Simulate(RunArgs),
    /// Closed-form steady state, optionally cross-checked by integration.
    Steady(RunArgs),
    /// Steady-state current over a pump or population grid.
    Sweep(RunArgs),
    /// Radiative vs Auger decay of the metastable level.
    Decay(RunArgs),
    /// Collective spectral density of the emitted electrons.
    Spectrum(RunArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (run, args) = match &cli.command {
        Command::Simulate(a) => (runner::cmd_simulate as RunFn, a),
        Command::Steady(a) => (runner::cmd_steady as RunFn, a),
        Command::Sweep(a) => (runner::cmd_sweep as RunFn, a),
        Command::Decay(a) => (runner::cmd_decay as RunFn, a),
        Command::Spectrum(a) => (runner::cmd_spectrum as RunFn, a),
    };
    match run(&args.config, &args.out, args.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

type RunFn = fn(&std::path::Path, &std::path::Path, Option<u64>) -> Result<(), auger_cli::CliError>;
