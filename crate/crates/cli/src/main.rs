use std::path::Path;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};
use pqkant_cli::args::{Cli, Command};
use pqkant_cli::config::overlay;
use pqkant_cli::jobs::Job;
use pqkant_cli::manifest::{execute, replay};
use pqkant_cli::{CliError, CliResult};

fn run() -> CliResult<String> {
    let matches = Cli::command().get_matches();
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    let sub = matches.subcommand().map(|(_, m)| m).expect("subcommand is required");

    macro_rules! with_config {
        ($args:expr) => {{
            let args = $args;
            match args.config.clone() {
                Some(path) => overlay(args, &path, sub)?,
                None => args,
            }
        }};
    }
    fn require_out(out: &Option<std::path::PathBuf>) -> CliResult<&Path> {
        out.as_deref().ok_or_else(|| CliError::Usage("--out is required".into()))
    }

    match cli.command {
        Command::Eval(a) => {
            let a = with_config!(a);
            execute(Job::try_from(&a)?, a.json.as_deref())
        }
        Command::Verify(a) => {
            let a = with_config!(a);
            execute(Job::try_from(&a)?, Some(require_out(&a.out)?))
        }
        Command::Bounds(a) => {
            let a = with_config!(a);
            execute(Job::try_from(&a)?, Some(require_out(&a.out)?))
        }
        Command::Converge(a) => {
            let a = with_config!(a);
            execute(Job::try_from(&a)?, Some(require_out(&a.out)?))
        }
        Command::Replay(a) => replay(&a.manifest, a.out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(stdout) => {
            print!("{stdout}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
