use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the cough detection toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch ({context}): expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("unsupported WAV format: {field} = {value} ({detail})")]
    UnsupportedWav {
        field: &'static str,
        value: String,
        detail: &'static str,
    },

    #[error("class `{class}` has {count} observations, at least {required} required")]
    ClassTooSmall {
        class: &'static str,
        count: usize,
        required: usize,
    },

    #[error("only one class present in {0}")]
    SingleClass(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("not enough distinct points: {distinct} distinct, {required} required")]
    TooFewDistinct { distinct: usize, required: usize },

    #[error("feature shortfall: {available} candidate features, {target} required")]
    SelectionShortfall { available: usize, target: usize },

    #[error("malformed {kind} file{}: {detail}", path.as_ref().map(|p| format!(" {}", p.display())).unwrap_or_default())]
    Format {
        kind: &'static str,
        path: Option<PathBuf>,
        detail: String,
    },

    #[error("checksum mismatch in {0} container")]
    Checksum(&'static str),

    #[error(transparent)]
    Wav(#[from] hound::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn format(kind: &'static str, detail: impl Into<String>) -> Self {
        Error::Format {
            kind,
            path: None,
            detail: detail.into(),
        }
    }

    /// Attaches a file path to format and I/O errors.
    pub fn with_path(self, path: impl Into<PathBuf>) -> Self {
        match self {
            Error::Io(source) => Error::File {
                path: path.into(),
                source,
            },
            Error::Format { kind, detail, .. } => Error::Format {
                kind,
                path: Some(path.into()),
                detail,
            },
            other => other,
        }
    }

    /// True for errors caused by bad user input rather than internal failures.
    /// Unreadable named files count as input errors; other I/O failures do not.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Io(_) => false,
            Error::File { source, .. } => matches!(
                source.kind(),
                std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied | std::io::ErrorKind::InvalidData
            ),
            _ => true,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
