use thiserror::Error;

use crate::model::{Bank, JobId, Slot};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("slot {slot}: {bank} bank over capacity ({used} > {capacity})")]
    CapacityExceeded {
        slot: Slot,
        bank: Bank,
        used: u64,
        capacity: u32,
    },

    #[error("slot {slot}: job {job} is not in the system")]
    UnknownJob { slot: Slot, job: JobId },

    #[error("slot {slot}: job {job} selected more than once")]
    DuplicateJob { slot: Slot, job: JobId },

    #[error("instance too large for exact search: {0}")]
    TooLarge(String),

    #[error("trace does not match scenario `{scenario}`: {reason}")]
    ScenarioMismatch { scenario: String, reason: String },

    #[error("policy `{policy}` cannot run here: {reason}")]
    PolicyModeMismatch { policy: String, reason: String },

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("{0}")]
    Usage(String),

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("run stalled at slot {0}: work remains but the policy keeps idling")]
    Stalled(Slot),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
