use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("point ({x:.3}, {y:.3}) lies outside the map raster")]
    OutOfMap { x: f64, y: f64 },
    #[error("lane graph has no usable segments")]
    EmptyMap,
    #[error("bad calibration: {0}")]
    BadCalibration(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("no true positives to compute errors from")]
    NoTruePositives,
    #[error("object placement failed for seed {seed} (frame {frame}, object {object}) after {attempts} attempts")]
    PlacementFailed {
        seed: u64,
        frame: u64,
        object: usize,
        attempts: usize,
    },
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("frame ids differ between prediction and ground-truth sets: {0}")]
    FrameMismatch(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the caller's inputs (files, config, data),
    /// false for failures of the tool itself.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Internal(_) | Error::NoTruePositives)
    }
}
