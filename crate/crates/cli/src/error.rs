use thiserror::Error;

/// Exit status for a violated inequality.
pub const EXIT_VIOLATED: u8 = 1;
/// Exit status for a numerical failure (non-convergence, poles, branch trouble).
pub const EXIT_NUMERICAL: u8 = 2;
/// Exit status for bad invocations, following `sysexits.h`.
pub const EXIT_USAGE: u8 = 64;
/// Exit status for I/O failures, following `sysexits.h`.
pub const EXIT_IO: u8 = 74;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] goluzin_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use goluzin_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Core(E::Domain(_) | E::UnknownMap(_)) => EXIT_USAGE,
            CliError::Core(_) => EXIT_NUMERICAL,
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => EXIT_IO,
        }
    }

    pub fn is_broken_pipe(&self) -> bool {
        use std::io::ErrorKind::BrokenPipe;
        match self {
            CliError::Io(e) => e.kind() == BrokenPipe,
            CliError::Json(e) => e.io_error_kind() == Some(BrokenPipe),
            CliError::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == BrokenPipe),
            _ => false,
        }
    }
}
