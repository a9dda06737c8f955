//! File formats, experiment commands and the command-line front end for
//! `wsntrack-core`.

pub mod cli;
pub mod commands;
pub mod error;
pub mod output;
pub mod records;
pub mod settings;

use cli::{Cli, Command};
use error::CliError;

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(a) => commands::cmd_run(a),
        Command::Compare(a) => commands::cmd_compare(a),
        Command::Predict(a) => commands::cmd_predict(a),
        Command::Sweep(a) => commands::cmd_sweep(a),
    }
}
