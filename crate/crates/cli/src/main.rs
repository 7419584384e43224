use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use chandet_cli::{render_report, run_pipeline, Command, Format, Options, WitnessChoice};
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

/// Detect properties of quantum channels from a channel-spec file.
#[derive(Parser, Debug)]
#[command(name = "chandet", version)]
struct Args {
    command: Command,

    /// Channel-spec JSON file.
    #[arg(long)]
    channel: PathBuf,

    /// Shots per measurement setting (0 = exact evaluation).
    #[arg(long)]
    shots: Option<u64>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Random starts for the product-unitary optimizer.
    #[arg(long, default_value_t = chandet_core::detect::DEFAULT_STARTS)]
    starts: usize,

    /// Witness for decompose-witness and simulate.
    #[arg(long)]
    witness: Option<WitnessChoice>,

    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = Options {
        shots: args.shots,
        seed: args.seed,
        starts: args.starts,
        witness: args.witness,
    };
    let start = Instant::now();
    match run_pipeline(args.command, &args.channel, &opts) {
        Ok(mut report) => {
            if args.timing {
                report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            let format = match args.format {
                OutputFormat::Json => Format::Json,
                OutputFormat::Text => Format::Text,
            };
            print!("{}", render_report(&report, format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
