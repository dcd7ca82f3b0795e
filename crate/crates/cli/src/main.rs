use std::process::ExitCode;

use clap::Parser;
use renyi_cli::args::{Cli, RunConfig};
use renyi_cli::commands::execute;
use renyi_cli::error::EXIT_CONFIG;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    match RunConfig::new(cli).and_then(|cfg| execute(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("renyi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
