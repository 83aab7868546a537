use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("coupling profile is not of angular-momentum form (max relative deviation {max_rel_dev:e})")]
    UnsupportedProfile { max_rel_dev: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("propagation failed at step {step}: error estimate {residual:e} above tolerance")]
    PropagationFailure { step: usize, residual: f64 },

    #[error("dimension {requested} exceeds cap {cap}")]
    DimensionOverflow { requested: usize, cap: usize },

    #[error("index {index} out of range for {len} sites")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cycle needs {required} bus sites but the bus has {available}")]
    BusCapacity { required: usize, available: usize },

    #[error("cycle {cycle}: transfer into occupied location ({what})")]
    TransferIntoOccupied { cycle: usize, what: String },

    #[error("cycle {cycle}: inconsistent withdrawal from bus site {site} ({what})")]
    InconsistentWithdrawal { cycle: usize, site: usize, what: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
