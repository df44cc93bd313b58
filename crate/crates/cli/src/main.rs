use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod commands;

use args::Cli;

/// Exit status and machine-readable description of a failed run.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, kind: "UsageError", message: message.into() }
    }
}

impl From<wtail::Error> for Failure {
    fn from(e: wtail::Error) -> Self {
        Failure { code: if e.is_io() { 3 } else { 2 }, kind: e.kind(), message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 3, kind: "IoError", message: e.to_string() }
    }
}

fn report(failure: &Failure, json: bool) {
    let mut stderr = std::io::stderr().lock();
    if json {
        let obj = serde_json::json!({
            "error": { "kind": failure.kind, "message": failure.message, "exit_code": failure.code }
        });
        let _ = writeln!(stderr, "{obj}");
    } else {
        let _ = writeln!(stderr, "error: {}: {}", failure.kind, failure.message);
    }
}

fn main() -> ExitCode {
    let raw: Vec<OsString> = std::env::args_os().collect();
    let json_errors = raw.iter().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse_from(&raw) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) if json_errors => {
            report(&Failure::usage(e.kind().to_string()), true);
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };

    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            report(&f, cli.json_errors);
            ExitCode::from(f.code)
        }
    }
}
