use thiserror::Error;

/// Errors produced by the winding library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("step count must be at least 1")]
    ZeroSteps,

    #[error("point lies on the curve")]
    PointOnCurve,

    #[error("degenerate point: {0}")]
    DegeneratePoint(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("point coincides with a refined sample; resample the path")]
    Resample,

    #[error("the integral diverges at z = 0")]
    Divergent,

    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: String, reason: String },

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for errors caused by a bad configuration or argument.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::InvalidArgument { .. }
                | Error::ZeroSteps
                | Error::DegeneratePoint(_)
                | Error::Json(_)
        )
    }

    /// True for filesystem errors.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
