use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = socialbroker_cli::Cli::parse();
    ExitCode::from(socialbroker_cli::run(cli))
}
