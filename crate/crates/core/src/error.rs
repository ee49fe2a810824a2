use std::path::PathBuf;

/// Errors raised by model evaluation, the evolutionary engine and the
/// experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate denominator (|{what}| = {magnitude:e})")]
    DegenerateDenominator { what: &'static str, magnitude: f64 },

    #[error("model response has zero magnitude at omega = {omega}")]
    ZeroMagnitude { omega: f64 },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid bounds for gene {index}: [{lower}, {upper}]")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },

    #[error("genotype length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("individual {index} has not been evaluated")]
    Unevaluated { index: usize },

    #[error("caste {0} has no members")]
    EmptyCaste(usize),

    #[error("population of {population} cannot be split into {castes} non-empty castes")]
    CasteCount { population: usize, castes: usize },

    #[error("nothing to export")]
    EmptyResults,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv { path: path.into(), source }
    }
}
