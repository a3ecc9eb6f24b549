use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input data.
    #[error("input error: {0}")]
    Input(String),

    /// Invalid parameters: bad part counts, task counts, ratios, iteration counts.
    #[error("configuration error: {0}")]
    Config(String),

    /// A runtime contract between tasks was broken (e.g. a task queued a
    /// vertex it does not own, or collective inputs disagree in shape).
    #[error("protocol violation: {0}")]
    Protocol(String),

    /// A task failed during a superstep; the whole superstep is aborted.
    #[error("superstep {superstep} aborted: task {task} failed: {source}")]
    TaskFailed {
        superstep: usize,
        task: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn protocol(msg: impl Into<String>) -> Self {
        Error::Protocol(msg.into())
    }
}
