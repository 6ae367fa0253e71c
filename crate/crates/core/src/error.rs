use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's preconditions.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },

    /// Vector/matrix dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A mixing scheme was requested on a graph it does not support.
    #[error("mixing scheme `{scheme}` not applicable: {reason}")]
    Scheme { scheme: String, reason: String },

    /// CSV ingestion failed; `row` is 1-based and counts data rows.
    #[error("ingestion failed at row {row}: {reason}")]
    Ingestion { row: usize, reason: String },

    /// The gossip matrix does not mix (second eigenvalue at or above one).
    #[error("network does not mix: sigma2 = {sigma2} >= 1")]
    Divergence { sigma2: f64 },

    /// A run configuration is internally inconsistent.
    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    /// Requested theory calculation outside its regime of validity.
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    /// The requested metric cannot be computed on the given data.
    #[error("metric `{metric}` unavailable: {reason}")]
    UnsupportedMetric { metric: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("serialization: {0}")]
    Serialization(#[from] serde_json::Error),
}

impl Error {
    pub fn parameter(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn dimension(reason: impl Into<String>) -> Self {
        Error::Dimension(reason.into())
    }
}
