use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use resurgence_cli::{run, Cli, Threaded};
use serde_json::json;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli, &Threaded::from_env()) {
        Ok(out) => {
            // A closed stdout (e.g. piped into `head`) is not an error.
            let mut stdout = std::io::stdout().lock();
            let _ = if cli.json {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&out.json).unwrap())
            } else {
                write!(stdout, "{}", out.text)
            };
            ExitCode::from(out.code)
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(std::io::stdout(), "{}", json!({"error": e.to_string(), "exit_code": e.exit_code()}));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
