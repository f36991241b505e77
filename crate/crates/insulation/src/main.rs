use std::process::ExitCode;

use clap::Parser;
use insulation::{execute, Cli};

fn main() -> ExitCode {
    ExitCode::from(execute(Cli::parse()))
}
