use thiserror::Error;

/// Errors surfaced by the library.
///
/// The CLI maps these onto exit codes: configuration problems to 2,
/// resource limits to 3, numerical failures to 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension {dim} exceeds the dense limit of {limit} sites")]
    DenseLimit { dim: usize, limit: usize },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("model {0} has no hard spectral cutoff")]
    NoHardCutoff(String),

    #[error("model {0} is not reducible to free fermions")]
    NotFreeFermion(String),

    #[error("integrator failure at t = {t}, lambda = {lambda}: {reason}")]
    Integrator { t: f64, lambda: f64, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("objective failed at {param} = {value}: {source}")]
    Objective {
        param: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// True for errors that indicate a configuration mistake.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::NoHardCutoff(_)
                | Error::NotFreeFermion(_)
                | Error::Serde(_)
        )
    }

    /// True for errors caused by a size or memory limit.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::DenseLimit { .. } | Error::Resource(_))
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
