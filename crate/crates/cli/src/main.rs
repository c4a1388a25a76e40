mod args;
mod commands;
mod corpus;
mod target;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};

fn init_logging() {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .parse_env("GOSCOPE_LOG")
        .format(|buf, record| {
            let level = record.level().as_str().to_ascii_lowercase();
            writeln!(buf, "goscope: {level}: {}", record.args())
        })
        .init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::FAILURE,
            };
        }
    };
    let result = match cli.command {
        Command::Scan(cmd) => commands::scan(cmd),
        Command::Diff(cmd) => commands::diff(cmd),
        Command::Corpus(cmd) => corpus::run(cmd),
        Command::Fetch(cmd) => commands::fetch(cmd),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("goscope: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
