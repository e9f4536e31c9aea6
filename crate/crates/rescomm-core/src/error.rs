use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An input value violated an operation precondition (non-finite, out of
    /// range, wrong sign).
    #[error("rejected input: {0}")]
    RejectedInput(String),

    /// A state value that must stay finite became NaN or infinite.
    #[error("state integrity violated: {0}")]
    Integrity(String),

    /// Invalid parameters or scenario configuration (dangling ids, bad
    /// thresholds, zero-delay cycles, unknown keys).
    #[error("configuration error: {0}")]
    Config(String),

    /// Scenario text failed to parse; message carries the line/column span
    /// reported by the parser.
    #[error("scenario parse error: {0}")]
    Parse(String),

    /// The model cannot produce the requested behaviour (e.g. no spike even
    /// at the upper bisection bracket).
    #[error("model misconfiguration: {0}")]
    Model(String),

    /// A numeric kernel failed to converge or produced a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Evaluation requested at a mathematical singularity.
    #[error("singularity: {0}")]
    Singularity(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code contract used by the CLI: 2 configuration/input,
    /// 3 model, 4 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::RejectedInput(_)
            | Error::Integrity(_)
            | Error::Config(_)
            | Error::Parse(_)
            | Error::Singularity(_) => 2,
            Error::Model(_) | Error::Numeric(_) => 3,
            Error::Io(_) => 4,
        }
    }
}
