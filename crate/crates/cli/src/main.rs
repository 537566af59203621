mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Model(a2g_los::Error),
}

impl From<a2g_los::Error> for CliError {
    fn from(e: a2g_los::Error) -> Self {
        CliError::Model(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Model(e) if e.is_numerical() => 2,
            CliError::Model(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Model(e) => write!(f, "{e}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::EvalParam(a) => commands::eval_param(a),
        Command::Fit(a) => commands::fit(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Compare(a) => commands::compare(a),
        Command::Fresnel(a) => commands::fresnel(a),
        Command::Presets => commands::presets(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
