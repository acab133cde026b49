use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("observation with timestamp {0} already pending in channel")]
    DuplicateTimestamp(u64),

    #[error("observation timestamp {timestamp} does not match send time {now}")]
    TimestampMismatch { timestamp: u64, now: u64 },

    #[error("environment stepped after episode end")]
    StepAfterDone,

    #[error("non-finite physical state {0:?}")]
    NonFinite([f64; 4]),

    #[error("augmented state space needs {required} states, cap is {cap}")]
    SizeCap { required: u128, cap: usize },

    #[error("action log of length {len} exceeds enumeration bound {bound}")]
    EnumerationBound { len: usize, bound: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("checkpoint parse error at line {line}: {msg}")]
    Checkpoint { line: usize, msg: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_index(what: &'static str, index: usize, limit: usize) -> Result<()> {
    if index < limit {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { what, index, limit })
    }
}
