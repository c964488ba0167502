use std::process::ExitCode;

use clap::Parser;
use gclab_cli::{dispatch, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(paths) => {
            if !cli.quiet {
                for p in paths {
                    println!("wrote {}", p.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gclab: {e}");
            ExitCode::FAILURE
        }
    }
}
