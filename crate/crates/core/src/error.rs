//! Error type shared across the pipeline.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data (empty series, grid mismatch, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A requested time or window falls outside the recording.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// Sensor mount rotation is not a proper rotation matrix.
    #[error("invalid mount '{sensor_id}': {reason}")]
    InvalidMount { sensor_id: String, reason: String },

    /// No sample of the trigger channel exceeded the impact threshold.
    #[error("no impact found: resultant acceleration never reached {threshold} m/s^2")]
    NoImpactFound { threshold: f64 },

    /// The signal carries no energy where the analysis needs it (e.g. an
    /// all-zero record fed to the wavelet-based cutoff selection).
    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    /// Requested low-pass cutoff is not realizable at the sampling rate.
    #[error("invalid cutoff {cutoff_hz} Hz for sample rate {sample_rate_hz} Hz")]
    InvalidCutoff { cutoff_hz: f64, sample_rate_hz: f64 },

    /// Correlation statistics are undefined (zero variance in an input).
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    /// Division by zero in a normalized statistic (some reference value is 0).
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// A recording or report file failed to parse.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A recording violated the documented schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// Configuration value outside its documented range.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn out_of_range(msg: impl Into<String>) -> Self {
        Error::OutOfRange(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
