use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The requested computation exceeds a configured desk-scale limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A documented precondition was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An internal self-check failed; indicates a bug, not bad input.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// The class relation is not guaranteed to be an equivalence when the
    /// rank-width of the graph is exactly c+1.
    #[error("below threshold: rank-width is c+1 = {0}, class relation not guaranteed an equivalence")]
    AmbiguousThreshold(usize),

    /// No representative of the requested type exists within the size cap.
    #[error("representative search exhausted at size cap {cap}{}", context_suffix(.context))]
    RepSearchExhausted { cap: usize, context: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn context_suffix(context: &str) -> String {
    if context.is_empty() {
        String::new()
    } else {
        format!(" ({context})")
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
