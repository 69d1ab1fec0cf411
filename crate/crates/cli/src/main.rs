mod args;
mod commands;
mod emit;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use emit::{EXIT_NO_CONVERGENCE, EXIT_UNKNOWN_SUBCOMMAND, EXIT_VALIDATION};

fn threads_from_env() -> Option<usize> {
    std::env::var("FRACLAP_THREADS").ok()?.trim().parse().ok()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand => EXIT_UNKNOWN_SUBCOMMAND,
                _ => EXIT_VALIDATION,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if let Some(n) = cli.global.threads.or_else(threads_from_env) {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_VALIDATION);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(1);
        }
    }

    if cli.selftest {
        let results = fraclap::selftest::run_all();
        print!("{}", fraclap::selftest::format_table(&results));
        return ExitCode::from(if results.iter().all(|r| r.passed) { 0 } else { 1 });
    }

    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (see --help)");
        return ExitCode::from(EXIT_VALIDATION);
    };
    match commands::run(&command, &cli.global).and_then(|out| out.write(&cli.global)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_NO_CONVERGENCE),
        Err(e) => {
            if let Err(w) = e.write_best_effort(&cli.global) {
                eprintln!("error: {w}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
