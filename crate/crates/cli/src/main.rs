use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use riskscale_cli::{execute, Command, Overrides, EXIT_USAGE};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Sample,
    Premium,
    Taildep,
    Verify,
}

/// Random shift and random scale risk models: sampling, credibility
/// premiums, tail dependence and the built-in verification suite.
#[derive(Debug, Parser)]
#[command(name = "riskscale", version)]
struct Args {
    command: Cmd,
    /// Flat `key = value` run configuration (optional for `verify`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's `output`; stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(threads) = riskscale::stats::threads_from_env() {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("riskscale: cannot start {threads} workers: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let command = match args.command {
        Cmd::Sample => Command::Sample,
        Cmd::Premium => Command::Premium,
        Cmd::Taildep => Command::TailDep,
        Cmd::Verify => Command::Verify,
    };
    let overrides = Overrides {
        seed: args.seed,
        out: args.out,
    };
    execute(command, args.config.as_deref(), &overrides)
}
