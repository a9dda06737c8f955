use std::process::ExitCode;

use clap::Parser;
use wsntrack_cli::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match wsntrack_cli::execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wsntrack: {e}");
            ExitCode::from(&e)
        }
    }
}
