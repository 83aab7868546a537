use graphbus::Error;

/// Failure modes of a command, each with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("computation failed: {0}")]
    Failure(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Io(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) => CliError::Invalid(m),
            Error::UnsupportedProfile { .. }
            | Error::IndexOutOfRange { .. }
            | Error::DimensionMismatch { .. } => CliError::Invalid(e.to_string()),
            Error::DimensionOverflow { .. } | Error::BusCapacity { .. } => CliError::Resource(e.to_string()),
            Error::NumericalFailure(_)
            | Error::PropagationFailure { .. }
            | Error::TransferIntoOccupied { .. }
            | Error::InconsistentWithdrawal { .. } => CliError::Failure(e.to_string()),
        }
    }
}
