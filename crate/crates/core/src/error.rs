use std::path::PathBuf;

/// Errors produced by the decblur pipelines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a precondition (bad sigma, mismatched sizes, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A computation produced a non-finite value.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Filesystem error, annotated with the path involved.
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Image decode/encode error, annotated with the path involved.
    #[error("image error at {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
