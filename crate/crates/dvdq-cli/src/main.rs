//! `dvdq`: data-free quantization toolkit CLI.
//!
//! Exit codes: 0 success, 1 runtime (I/O) failure, 2 usage or input
//! validation failure. `DVDQ_THREADS` caps worker parallelism.

mod commands;
mod svg;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dvdq_core::Error;

#[derive(Debug, Parser)]
#[command(name = "dvdq", version, about = "Data-free low-bit quantization toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print per-step detail where available.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantize the layers of a manifest into packed tensors plus reports.
    Quantize(commands::quantize::QuantizeArgs),
    /// Rotation/scaling diagnostics for NPY activation dumps.
    EvalArq(commands::eval_arq::EvalArqArgs),
    /// Run one synthetic denoising experiment.
    Simulate(commands::simulate::SimulateArgs),
    /// Sweep the bit-switching threshold.
    SweepDelta(commands::sweep::SweepArgs),
    /// Render comparison tables and histograms from saved reports.
    Report(commands::report::ReportArgs),
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("DVDQ_THREADS") {
        match value.parse::<usize>() {
            Ok(n) if n > 0 => {
                // Ignore the error if a pool was already installed.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("dvdq: ignoring invalid DVDQ_THREADS value {value:?}"),
        }
    }
}

fn main() -> ExitCode {
    // Die quietly on SIGPIPE like other unix filters instead of panicking
    // when stdout is closed early (e.g. piped into `head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    init_thread_pool();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Quantize(args) => commands::quantize::run(args, cli.verbose),
        Command::EvalArq(args) => commands::eval_arq::run(args),
        Command::Simulate(args) => commands::simulate::run(args, cli.verbose),
        Command::SweepDelta(args) => commands::sweep::run(args),
        Command::Report(args) => commands::report::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("dvdq: error: {err}");
            match err {
                Error::Validation(_) | Error::Format(_) | Error::Unsupported(_) => {
                    ExitCode::from(2)
                }
                Error::Io { .. } => ExitCode::from(1),
            }
        }
    }
}
