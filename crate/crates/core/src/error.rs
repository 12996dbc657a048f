use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GtError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("empty mixture: no cluster and no valid label")]
    EmptyMixture,

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl GtError {
    pub(crate) fn format(offset: u64, message: impl Into<String>) -> Self {
        GtError::Format {
            offset,
            message: message.into(),
        }
    }

    /// True for errors that come from reading or writing files.
    pub fn is_io_or_format(&self) -> bool {
        matches!(
            self,
            GtError::Io(_) | GtError::Format { .. } | GtError::UnsupportedFormat(_)
        )
    }
}

pub type Result<T, E = GtError> = std::result::Result<T, E>;
