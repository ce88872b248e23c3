use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use rhszego::{error_json, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.output.is_none() {
                let _ = std::io::stdout().write_all(out.json.as_bytes());
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            let _ = std::io::stderr().write_all(error_json(&e).as_bytes());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
