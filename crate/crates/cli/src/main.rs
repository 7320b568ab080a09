mod args;
mod commands;
mod config;
mod error;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;
use std::time::Instant;

use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches};

use args::{Cli, Command};
use error::{CliError, CliResult, EXIT_INTERNAL};
use output::Ctx;

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(code) => code,
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Parses `argv`, folding in `--config` entries not given as flags. Usage
/// errors exit through clap with status 2.
fn parse(argv: Vec<OsString>) -> CliResult<(Cli, ArgMatches, clap::Command)> {
    let mut cmd = Cli::command();
    cmd.build();
    let mut matches = cmd.clone().try_get_matches_from(&argv).unwrap_or_else(|e| e.exit());
    if let Some(path) = matches.get_one::<std::path::PathBuf>("config").cloned() {
        let entries = config::read_config(&path)?;
        let extra = config::config_args(&cmd, &matches, &entries)?;
        let merged: Vec<OsString> = argv.into_iter().chain(extra).collect();
        matches = cmd.clone().try_get_matches_from(&merged).unwrap_or_else(|e| e.exit());
    }
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    Ok((cli, matches, cmd))
}

fn run(argv: Vec<OsString>) -> CliResult<ExitCode> {
    let start = Instant::now();
    let (cli, matches, cmd) = parse(argv)?;
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return Err(CliError::Invalid("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid(format!("cannot configure {n} threads: {e}")))?;
    }
    let (_, leaf) = config::leaf(&cmd, &matches);
    let seed_explicit = [leaf, &matches]
        .iter()
        .any(|m| m.value_source("seed") == Some(ValueSource::CommandLine));
    let ctx = Ctx {
        common: cli.common.clone(),
        seed_explicit,
        config: config::effective_config(&cmd, &matches),
        start,
    };
    match &cli.command {
        Command::Lattice { op } => commands::lattice::run(&ctx, op)?,
        Command::Spectrum { op } => commands::spectrum::run(&ctx, op)?,
        Command::Layers(a) => commands::layers::run(&ctx, a)?,
        Command::Selftest(a) => {
            if !commands::selftest::run(&ctx, a)? {
                return Ok(ExitCode::from(EXIT_INTERNAL));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
