//! invariant-forge: exact-arithmetic toolkit for presented structures.
//! One job per process: parse inputs, dispatch, print a deterministic report.

use clap::error::ErrorKind;
use clap::Parser;
use invariant_forge::{commands, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                std::process::exit(0);
            }
            _ => {
                eprint!("{e}");
                std::process::exit(64);
            }
        },
    };
    match commands::run(&cli) {
        Ok(out) => print!("{out}"),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
