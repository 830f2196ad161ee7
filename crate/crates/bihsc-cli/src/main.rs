use bihsc_cli::commands::{cmd_control, cmd_observability, cmd_scan, cmd_spectrum};
use bihsc_cli::scenario::Scenario;
use bihsc_cli::CliError;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Spectral analysis and boundary null-control synthesis for the linear
/// biharmonic Schrödinger equation on an interval with hinged ends.
///
/// Every command reads a strict JSON scenario and writes deterministic
/// CSV/JSON artifacts under the output prefix. Worker parallelism of the
/// scan command is capped by the RAYON_NUM_THREADS environment variable.
#[derive(Parser)]
#[command(name = "bihsc", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue table and resonance summary.
    Spectrum(CommonArgs),
    /// Gram conditioning, observability constant, invisible mode.
    Observability(CommonArgs),
    /// Moment-method null control with certification (or resonant
    /// diagnosis; exit code 2).
    Control(CommonArgs),
    /// Observability sweep over a gamma grid.
    Scan(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the JSON scenario.
    #[arg(long)]
    config: PathBuf,
    /// Output path prefix; falls back to the scenario's "outputs" field.
    #[arg(long)]
    out: Option<String>,
}

fn run(command: &Command) -> Result<(), CliError> {
    let args = match command {
        Command::Spectrum(a) | Command::Observability(a) | Command::Control(a) | Command::Scan(a) => a,
    };
    let scenario = Scenario::load(&args.config)?;
    let prefix = args
        .out
        .clone()
        .or_else(|| scenario.outputs.clone())
        .ok_or_else(|| {
            CliError::validation("no output prefix: pass --out or set 'outputs' in the scenario")
        })?;
    match command {
        Command::Spectrum(_) => cmd_spectrum(&scenario, &prefix),
        Command::Observability(_) => cmd_observability(&scenario, &prefix),
        Command::Control(_) => cmd_control(&scenario, &prefix),
        Command::Scan(_) => cmd_scan(&scenario, &prefix),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // Machine-readable error object on stdout; human note on stderr.
            println!("{}", err.to_json());
            eprintln!("bihsc: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
