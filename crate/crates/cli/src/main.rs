use std::process::ExitCode;

use clap::Parser;
use nambu_verify::{run, Cli};

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
