//! Command-line front end for the `espm` battery model.

pub mod args;
pub mod commands;
pub mod error;
pub mod verify;

use std::io::Write;

use args::{Cli, Command};
use error::{CliError, CliResult};

/// Runs a parsed command line on the current rayon pool.
pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Identify(a) => commands::identify_command(a),
        Command::Sweep(a) => commands::sweep_command(a),
        Command::Synth(a) => {
            let summary = commands::synth(a)?;
            let text = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Output(e.to_string()))?;
            // A closed stdout is not an error for a summary nobody reads.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}
