mod args;
mod commands;
mod error;
mod grid;
mod input;
mod report;
mod selftest;

use std::fs;
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

fn configure_threads() {
    if let Some(n) = std::env::var("COARSEKIT_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let outcome = commands::run(cli.command).and_then(|(text, path)| match path {
        Some(path) => fs::write(&path, text).map_err(|source| error::CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("coarsekit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
