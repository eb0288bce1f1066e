use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use persuade_cli::{run, Cli};

fn main() -> ExitCode {
    let out = run(Cli::parse());
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(persuade_cli::EXIT_ERROR);
    }
    for line in &out.stderr {
        eprintln!("{line}");
    }
    ExitCode::from(out.code)
}
