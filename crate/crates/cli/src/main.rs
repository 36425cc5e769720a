//! `qdescent` — command-line front end for the randomized descent library.
//!
//! Subcommands: `solve` (one run, one trace CSV), `rates` (exact rate table),
//! `experiment` (Monte Carlo presets or JSON configs, CSV + SVG output) and
//! `verify` (numerical theorem checks). Diagnostics go to stderr, data to
//! files; every run echoes its resolved seed so results can be replayed.

mod cmd;
mod svg;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "qdescent",
    version,
    about = "Randomized descent methods for symmetric positive definite quadratics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on one problem and write its error trace as CSV
    Solve(cmd::solve::SolveArgs),
    /// Tabulate exact per-step contractions and complexities for a method grid
    Rates(cmd::rates::RatesArgs),
    /// Run a preset or configured Monte Carlo experiment; emit CSVs and SVG charts
    Experiment(cmd::experiment::ExperimentArgs),
    /// Numerically verify a theorem with default parameters and report the margin
    Verify(cmd::verify::VerifyArgs),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => cmd::solve::run(args),
        Command::Rates(args) => cmd::rates::run(args),
        Command::Experiment(args) => cmd::experiment::run(args),
        Command::Verify(args) => cmd::verify::run(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
