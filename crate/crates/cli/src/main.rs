mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

const THREADS_VAR: &str = "GAUSS_NCLASS_THREADS";

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot size thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let config = cli.config.as_deref();
    match cli.command {
        Command::PfuncCut(a) => commands::pfunc_cut(a.merge(commands::load_config(config)?)),
        Command::Measures(a) => commands::measures(a.merge(commands::load_config(config)?)),
        Command::Canonicalize(a) => commands::canonicalize(a.merge(commands::load_config(config)?)),
        Command::McStudy(a) => commands::mc_study(a.merge(commands::load_config(config)?)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
