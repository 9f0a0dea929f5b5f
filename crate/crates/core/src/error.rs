use std::path::PathBuf;

use thiserror::Error;

use crate::landmarks::EyeSide;
use crate::segmentation::SideFailure;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("empty input")]
    EmptyInput,

    #[error("landmark parse error: {0}")]
    Parse(String),

    #[error("landmark schema error at `{field}`: {reason}")]
    Schema { field: String, reason: String },

    #[error("{0} eye is degenerate (collinear or closed contour)")]
    DegenerateEye(EyeSide),

    #[error("both eyes failed: left: {left}; right: {right}")]
    BothEyesDegenerate {
        left: SideFailure,
        right: SideFailure,
    },

    #[error("region contains no pixels")]
    EmptyRegion,

    #[error("region [{x0},{x1})x[{y0},{y1}) exceeds image {width}x{height}")]
    RegionOutOfBounds {
        x0: u32,
        y0: u32,
        x1: u32,
        y1: u32,
        width: u32,
        height: u32,
    },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("saturation factor must be finite and > 0, got {0}")]
    InvalidFactor(f64),

    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: decode error: {reason}", path.display())]
    Decode { path: PathBuf, reason: String },

    #[error("{}: unsupported image format", path.display())]
    UnsupportedFormat { path: PathBuf },

    #[error("encode error: {0}")]
    Encode(String),

    #[error("report error: {0}")]
    Report(String),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
