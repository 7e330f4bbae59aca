use std::path::PathBuf;

/// Crate-wide error type.
///
/// The variants are grouped the way the CLI reports them: configuration
/// problems (bad flags, malformed alias rules), data problems (broken
/// archives, integrity failures), and everything else.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("mbox format error at byte {offset}: {reason}")]
    MboxFormat { offset: usize, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("unknown node '{0}'")]
    UnknownNode(String),

    #[error("stage '{stage}' dataset invalid: {reason}")]
    Stage { stage: String, reason: String },

    #[error("{0}")]
    Internal(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error: 1 config, 2 data, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::MboxFormat { .. }
            | Error::Data(_)
            | Error::UnknownNode(_)
            | Error::Stage { .. } => 2,
            Error::Io { .. } | Error::Internal(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
