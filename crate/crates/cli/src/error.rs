use std::io;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] z6_core::Error),

    #[error("{0}")]
    Usage(String),

    #[error("{0} check(s) failed")]
    ChecksFailed(usize),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for unsupported parameters or bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> ExitCode {
        let code = match self {
            CliError::Core(z6_core::Error::Regime(_) | z6_core::Error::InvalidInput(_)) | CliError::Usage(_) => 2,
            CliError::Core(_) => 3,
            CliError::ChecksFailed(_) | CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => 1,
        };
        ExitCode::from(code)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) if e.is_regime() => "RegimeError",
            CliError::Core(z6_core::Error::InvalidInput(_)) | CliError::Usage(_) => "InvalidInput",
            CliError::Core(_) => "NumericalError",
            CliError::ChecksFailed(_) => "ChecksFailed",
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => "OutputError",
        }
    }
}
