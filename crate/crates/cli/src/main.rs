//! Thin argument layer: read the config file, hand the text to the library,
//! print what comes back, and exit with the mapped code.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use subshift_cli::{run_check, run_construct, run_simulate, Outcome};

#[derive(Parser)]
#[command(name = "subshift", about = "Weighted-shift subspace dynamics toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a decay or limsup criterion from a JSON config.
    Check(CommonArgs),
    /// Run an orbit density experiment from a JSON config.
    Simulate(CommonArgs),
    /// Build and self-verify a weight family from a JSON config.
    Construct(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Write trace data as CSV to this path.
    #[arg(long)]
    trace_csv: Option<PathBuf>,
    /// Emit the full report as JSON instead of human-readable lines.
    #[arg(long)]
    json: bool,
}

fn dispatch(args: &CommonArgs, run: impl FnOnce(&str, bool) -> Outcome) -> ExitCode {
    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };
    let outcome = run(&text, args.json);
    println!("{}", outcome.stdout);
    if let Some(path) = &args.trace_csv {
        match outcome.csv {
            Some(csv) => {
                if let Err(e) = fs::write(path, csv) {
                    eprintln!("cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            None => eprintln!("no trace data produced; {} not written", path.display()),
        }
    }
    ExitCode::from(u8::try_from(outcome.exit_code).unwrap_or(1))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Check(args) => dispatch(args, run_check),
        Command::Simulate(args) => dispatch(args, run_simulate),
        Command::Construct(args) => dispatch(args, run_construct),
    }
}
