use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error(transparent)]
    Core(#[from] hyperxray::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 = check failure, 2 = input or schema error, 3 = quadrature non-convergence.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Check(_) => 1,
            CliError::Quadrature(_) => 3,
            CliError::Input(_) | CliError::Core(_) | CliError::Io(_) => 2,
        })
    }
}
