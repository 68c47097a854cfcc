use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or input value is outside its valid domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("calibration failed: {reason} (residuals: {residuals:?})")]
    Calibration { reason: String, residuals: Vec<f64> },

    /// A duty command violates the interleaved-parallel sum limit.
    #[error("duty constraint violated: {0}")]
    Constraint(String),

    #[error("boost duty {d_m} makes the conversion ratio singular")]
    Singularity { d_m: f64 },

    #[error("simulation diverged at t = {t:.6} s: {what}")]
    BlowUp { t: f64, what: String },

    #[error("format error: {0}")]
    Format(String),

    /// Scenario/config problem; `key` is the dotted path of the offending entry.
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
