use std::process::ExitCode;

use achronal_cli::{execute, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("achronal: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
