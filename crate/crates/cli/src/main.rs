use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use otable_cli::{execute, expand_args, Cli, CliError};

fn fail(err: CliError) -> ExitCode {
    eprintln!("{}", err.record());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = match expand_args(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(CliError::Usage(e.to_string().trim_end().to_string())),
    };
    match execute(cli) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}
