use thiserror::Error;

use crate::ingest::fetch::ResumeToken;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("corrupt snapshot: {malformed} of {total} lines malformed (threshold {threshold:.1}%)", threshold = threshold * 100.0)]
    CorruptSnapshot { malformed: usize, total: usize, threshold: f64 },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("unknown node: {0}")]
    NotFound(String),

    #[error("undefined input: {0}")]
    UndefinedInput(String),

    #[error("no data: {0}")]
    NoData(String),

    #[error("pattern site table is empty")]
    NoSites,

    #[error("{nodes} nodes exceed the exact solver cap of {cap}; use the heuristic solver")]
    TooLarge { nodes: usize, cap: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("authentication rejected by {url} (HTTP {status})")]
    Auth { status: u16, url: String },

    #[error("fetch aborted after retries: {reason}")]
    FetchAborted { reason: String, resume_token: ResumeToken },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status for this error: 2 configuration or usage, 3
    /// corrupt input, 4 nothing to analyze, 5 network, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidInput(_) | Error::TooLarge { .. } => 2,
            Error::CorruptSnapshot { .. } | Error::Json(_) | Error::Csv(_) => 3,
            Error::NoData(_) | Error::NoSites | Error::UndefinedInput(_) | Error::NotFound(_) => 4,
            Error::Auth { .. } | Error::FetchAborted { .. } => 5,
            Error::Io(_) => 1,
        }
    }
}
