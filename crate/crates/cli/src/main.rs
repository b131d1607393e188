//! `genuskit`: genus counts of orders and polyhedral atoms from the command line.
//!
//! Exit status: 0 on success, 1 on invalid input (or a failed `check`),
//! 2 when an enumeration would exceed the element cap.

mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use commands::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource_limit() { 2 } else { 1 })
        }
    }
}
