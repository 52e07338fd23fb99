use std::process::ExitCode;

use clap::Parser;
use stclust::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match stclust::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
