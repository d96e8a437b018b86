use std::process::ExitCode;

use clap::Parser;
use eigopt_cli::{execute, Args};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EIGOPT_LOG", "warn")).init();
    let args = Args::parse();
    ExitCode::from(execute(&args) as u8)
}
