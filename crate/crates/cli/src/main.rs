mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use hyperctrl::Parallelism;

use args::{Cli, Command};
use commands::CliError;

fn configure_threads(threads: Option<usize>) -> Result<Parallelism, CliError> {
    match threads {
        Some(0) => Err(CliError::Param("--threads must be at least 1".into())),
        #[cfg(feature = "parallel")]
        Some(t) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| CliError::Param(format!("--threads: {e}")))?;
            Ok(if t == 1 {
                Parallelism::Sequential
            } else {
                Parallelism::Parallel
            })
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Parallelism::Sequential),
        None => Ok(Parallelism::default()),
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let parallelism = configure_threads(cli.threads)?;
    match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Degrees(a) => commands::degrees(a),
        Command::Check(a) => commands::check(a),
        Command::Mcn(a) => commands::mcn(a),
        Command::Ingest(a) => commands::ingest(a, parallelism),
        Command::Simulate(a) => commands::simulate_cmd(a),
        Command::Bench(a) => commands::bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("hyperctrl: {}", line.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hyperctrl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
