use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value failed validation.
    #[error("invalid configuration `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("could not parse configuration: {0}")]
    ConfigParse(String),

    /// An argument lies outside the domain of a model.
    #[error("{what} out of range: {value} (expected {expected})")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("station in sleep state {level} cannot carry {rbs} occupied RBs")]
    LoadWhileAsleep { level: String, rbs: u32 },

    #[error("layout rejected: {0}")]
    Layout(String),

    /// A simulation state check failed; indicates a defect, not bad input.
    #[error("invariant violated at t={t_s} s: {detail}")]
    Invariant { t_s: u64, detail: String },

    #[error("metric undefined: {0}")]
    Metric(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by user-supplied configuration.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig { .. } | Error::ConfigParse(_) | Error::Layout(_)
        )
    }
}
