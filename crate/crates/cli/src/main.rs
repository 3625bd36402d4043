//! Command-line front end: graph generation, eigenvalues, solves, solution
//! checks and parameter sweeps.

mod commands;
mod output;
mod problem;
mod sweep;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "graph-yamabe", version, about = "Yamabe-type equations on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a graph from a named family.
    Gen(commands::GenArgs),
    /// First eigenvalue (and optionally a Sobolev constant).
    Spectrum(commands::SpectrumArgs),
    /// Solve one instance and write report, solution and trace.
    Solve(commands::SolveArgs),
    /// Verify a solution file against a problem.
    Check(commands::CheckArgs),
    /// Solve along a parameter axis in parallel.
    Sweep(sweep::SweepArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GRAPH_YAMABE_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Solve(a) => commands::solve(a),
        Command::Check(a) => commands::check(a),
        Command::Sweep(a) => sweep::sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind as u8)
        }
    }
}
