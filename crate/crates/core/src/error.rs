use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Qubit count outside what a routine supports.
    #[error("{what}: {got} qubits is outside the supported range {min}..={max}")]
    Size {
        what: &'static str,
        got: usize,
        min: usize,
        max: usize,
    },

    /// A brute-force routine was asked to go beyond its configured cap.
    #[error("{what}: n = {got} exceeds the cap of {cap} qubits")]
    Capacity {
        what: &'static str,
        got: usize,
        cap: usize,
    },

    #[error("qubit index error: {0}")]
    Index(String),

    #[error("invalid bipartition: {0}")]
    Partition(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("value outside the domain of {what}: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unavailable: {0}")]
    Unavailable(String),

    #[error("numerical consistency check failed: {0}")]
    Numerical(String),

    /// Config problems always name the offending field.
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by asking for more qubits than a routine allows.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. } | Error::Size { .. })
    }
}
