use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] coalition_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("expected format `{expected}`, found `{found}`")]
    Format { expected: &'static str, found: String },
    #[error("unsupported {format} version {version}")]
    Version { format: &'static str, version: u32 },
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 invalid input, 2 size-gate refusal, 3 internal
    /// invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(coalition_core::Error::SizeLimit { .. }) => 2,
            Error::Core(coalition_core::Error::Invariant(_))
            | Error::Core(coalition_core::Error::SolverInconsistency { .. }) => 3,
            _ => 1,
        }
    }
}
