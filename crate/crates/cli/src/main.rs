use std::process::ExitCode;

use clap::Parser;
use nhqdyn_cli::args::Cli;
use nhqdyn_cli::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.execute() {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            for line in &outcome.summary {
                println!("{line}");
            }
            if outcome.failures > 0 {
                let err = CliError::AuditFailed { failures: outcome.failures };
                eprintln!("{}", err.to_json());
                return ExitCode::from(err.exit_code() as u8);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
