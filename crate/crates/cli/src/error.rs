use mbloch_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("physical regime: {0}")]
    Regime(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Regime(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let text = e.to_string();
        match e {
            Error::InvalidParameter { .. } | Error::Grid { .. } => CliError::Config(text),
            Error::LosslessCavity
            | Error::BelowThreshold { .. }
            | Error::DetuningExceedsFsr { .. }
            | Error::InstabilityUnreachable { .. } => CliError::Regime(text),
            Error::Integration(_)
            | Error::NotBracketed { .. }
            | Error::RootNotConverged { .. }
            | Error::NotAFixedPoint { .. }
            | Error::Divergent { .. }
            | Error::LengthMismatch { .. } => CliError::Solver(text),
        }
    }
}
