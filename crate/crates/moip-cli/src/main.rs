//! `moip` command line: generate benchmark instances, solve fronts exactly,
//! enumerate them by brute force, verify front files, and run benchmark
//! manifests.
//!
//! Exit statuses: 0 success, 2 verification mismatch, 3 time limit, 4 usage
//! or input error.

mod bench;
mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_MISMATCH: u8 = 2;
pub const EXIT_TIMEOUT: u8 = 3;
pub const EXIT_USAGE: u8 = 4;

#[derive(Parser)]
#[command(name = "moip", version, about = "Exact multi-objective integer programming tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded benchmark instance.
    Generate(commands::GenerateArgs),
    /// Compute the exact non-dominated front of an instance.
    Solve(commands::SolveArgs),
    /// Enumerate the front by brute force (guarded to small instances).
    Oracle(commands::OracleArgs),
    /// Compare two front files after canonical sorting.
    Verify(commands::VerifyArgs),
    /// Run a benchmark manifest and emit a table plus CSV.
    Bench(bench::BenchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.command {
        Command::Generate(args) => commands::generate(&args),
        Command::Solve(args) => commands::solve(&args),
        Command::Oracle(args) => commands::oracle(&args),
        Command::Verify(args) => commands::verify(&args),
        Command::Bench(args) => bench::bench(&args),
    };
    match status {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                moip::Error::Timeout => EXIT_TIMEOUT,
                moip::Error::OracleGuard(_) | moip::Error::Invalid(_) => EXIT_USAGE,
                moip::Error::Parse { .. } => EXIT_USAGE,
                moip::Error::Io(_) => EXIT_USAGE,
            })
        }
    }
}
