//! Error type shared across the crate.

use std::path::PathBuf;

/// All failure modes of the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input value violated a precondition (non-finite data, bad range,
    /// overlapping synthetic footprints, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration parameter is out of its allowed range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Tensor or mask dimensions do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// No valid depth pixel remains outside the exclusion masks, so no
    /// ground-plane reference can be computed.
    #[error("no valid pixels outside the exclusion masks; cannot estimate the ground plane")]
    NoGroundPlane,

    /// A mask region contains no valid depth pixel.
    #[error("mask region has no valid depth pixels")]
    NoDepth,

    /// An error raised while measuring a specific mask of a frame.
    #[error("mask {index}: {source}")]
    AtMask {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// Text-format parse failure with file/line diagnostics.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// Filesystem or image-decoding failure, naming the offending path.
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },

    /// Two files that must agree on dimensions do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The requested block has no backward contract to check.
    #[error("gradient check is not supported for {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::File {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// Wrap an error with the index of the mask being processed.
    pub fn at_mask(self, index: usize) -> Self {
        Error::AtMask {
            index,
            source: Box::new(self),
        }
    }
}
