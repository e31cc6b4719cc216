use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed input at line {line}: {msg}")]
    Format {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: record '{record}' has non-ACGT character {ch:?} at offset {offset}")]
    NonAcgt {
        path: PathBuf,
        record: String,
        offset: usize,
        ch: char,
    },

    #[error("{0}: input contains no records")]
    Empty(PathBuf),

    #[error("unknown read name '{0}'")]
    UnknownRead(String),

    #[error("input too large: {0}")]
    TooLarge(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code for the CLI: 1 usage, 2 input format, 3 invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::TooLarge(_) => 1,
            Error::Read { .. }
            | Error::Write { .. }
            | Error::Format { .. }
            | Error::NonAcgt { .. }
            | Error::Empty(_)
            | Error::UnknownRead(_) => 2,
            Error::Invariant(_) => 3,
        }
    }
}
