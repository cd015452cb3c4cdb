mod commands;
mod config;
mod error;
mod output;
mod selftest;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use goluzin_core::Status;

use config::RunConfig;
use error::{CliError, EXIT_USAGE, EXIT_VIOLATED};
use output::Output;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GOLUZIN_LAB_LOG", "warn")).init();
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match execute(&config) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("goluzin-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(config: &RunConfig) -> Result<u8, CliError> {
    if let Some(n) = config.jobs {
        if n == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let output = commands::run(config)?;
    match &config.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            output.write(config.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            // A reader that closes the pipe early (`| head`) is not an error.
            match output.write(config.format, &mut w).and_then(|()| Ok(w.flush()?)) {
                Err(e) if e.is_broken_pipe() => {}
                r => r?,
            }
        }
    }
    Ok(status_code(&output))
}

fn status_code(output: &Output) -> u8 {
    let failed = match output {
        Output::Params(_) => false,
        Output::Reports(r) => r.iter().any(|r| r.status == Status::Violated),
        Output::Checks(c) => c.iter().any(|c| !c.passed),
    };
    if failed {
        EXIT_VIOLATED
    } else {
        0
    }
}
