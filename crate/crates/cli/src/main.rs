//! `bicubic`: command-line driver for counting Hamiltonian configurations on
//! random bicubic maps and for analysing the resulting sequences.

mod cache;
mod crosscheck;
mod engines;
mod enumerate;
mod extrapolate;
mod predict;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bicubic", version, about = "Hamiltonian cycles on random bicubic maps: exact counts and exponents")]
struct Cli {
    /// Worker threads for the enumeration engines (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Significant decimal digits for extrapolation and exponent formulas.
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u32).range(10..=2000))]
    precision: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count configurations of one ensemble for every size up to a bound.
    Enumerate(enumerate::Args),
    /// Estimate the growth rate or exponent of a count sequence.
    Extrapolate(extrapolate::Args),
    /// Evaluate exponent predictions for a loop weight.
    Predict(predict::Args),
    /// Run every oracle check and report any disagreement.
    Crosscheck(crosscheck::Args),
}

/// A check that ran and disagreed; reported with exit status 1.
#[derive(Debug)]
pub struct Mismatch(pub String);

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Mismatch {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: could not size the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let digits = cli.precision as usize;
    let result = match cli.command {
        Command::Enumerate(a) => enumerate::run(a),
        Command::Extrapolate(a) => extrapolate::run(a, digits),
        Command::Predict(a) => predict::run(a, digits),
        Command::Crosscheck(a) => crosscheck::run(a, digits),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Mismatch>() => {
            eprintln!("mismatch: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
