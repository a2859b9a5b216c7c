//! Batch front end: `riskscale <command> --config <path> [--seed N] [--out <path>]`.

pub mod config;
pub mod run;

use std::path::PathBuf;
use std::process::ExitCode;

pub use config::{parse_config, parse_config_for, Command, ConfigError, Model, RunConfig};
pub use run::{run, RunOutput};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Reads, parses and runs one command, writes its output and returns the
/// process exit status. Diagnostics go to stderr.
pub fn execute(command: Command, config_path: Option<&std::path::Path>, overrides: &Overrides) -> ExitCode {
    let text = match config_path {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("riskscale: cannot read {}: {e}", p.display());
                return ExitCode::from(EXIT_USAGE);
            }
        },
        None if command == Command::Verify => String::new(),
        None => {
            eprintln!("riskscale: --config is required for `{command}`");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut config = match parse_config_for(&text, Some(command)) {
        Ok(c) => c,
        Err(e) => {
            match config_path {
                Some(p) => eprintln!("riskscale: {}: {e}", p.display()),
                None => eprintln!("riskscale: {e}"),
            }
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Some(s) = overrides.seed {
        config.seed = s;
    }
    if let Some(o) = &overrides.out {
        config.output = Some(o.clone());
    }
    let output = match run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("riskscale: {command} failed: {e}");
            return ExitCode::from(EXIT_NUMERIC);
        }
    };
    for note in &output.notes {
        eprintln!("{note}");
    }
    match &config.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &output.text) {
                eprintln!("riskscale: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => print!("{}", output.text),
    }
    ExitCode::from(if output.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}
