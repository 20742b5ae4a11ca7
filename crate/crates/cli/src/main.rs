mod args;
mod commands;
mod configfile;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};

const EXIT_ASSERTION: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<sharp_core::Error>() {
        Some(sharp_core::Error::Contract(_)) => EXIT_ASSERTION,
        _ => EXIT_CONFIG,
    }
}

fn run(cli: &Cli) -> anyhow::Result<Vec<output::Assertion>> {
    if let Some(w) = cli.workers {
        anyhow::ensure!(w > 0, "--workers must be positive");
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global()?;
    }
    let out = cli.out.as_deref();
    let start = Instant::now();
    let assertions = match &cli.command {
        Command::Crossing(a) => commands::crossing(a, cli.seed, out)?,
        Command::Theta(a) => commands::theta(a, cli.seed, out)?,
        Command::Inequalities(a) => commands::inequalities(a, cli.seed, out)?,
        Command::Er(a) => commands::er(a, cli.seed, out)?,
    };
    output::timing(out, cli.command.name(), start.elapsed())?;
    Ok(assertions)
}

fn main() -> ExitCode {
    let args = match configfile::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(assertions) => {
            let failed: Vec<_> = assertions.iter().filter(|a| !a.passed).collect();
            for a in &failed {
                eprintln!("FAIL {}: {}", a.name, a.detail);
            }
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ASSERTION)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
