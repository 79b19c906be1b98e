use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no image supplied for variable {0}")]
    MissingImage(String),

    #[error("jet order {order} exceeds the context maximum {max}")]
    OrderOverflow { order: usize, max: usize },

    #[error("{path}:{line}:{col}: {msg}")]
    Parse {
        path: String,
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("group law fails the {axiom} axiom: {detail}")]
    Axiom { axiom: String, detail: String },

    #[error("invariant violated [{id}]: {detail}")]
    Invariant { id: String, detail: String },

    #[error("character dimensions unstable under truncation: {0}")]
    Truncation(String),

    #[error("jet oracle disagreement: {0}")]
    Oracle(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invariant(id: &str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            id: id.to_string(),
            detail: detail.into(),
        }
    }

    /// 2 for bad input, 1 for violated invariants.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Input(_) | Error::Axiom { .. } | Error::Io { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
