use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mixed dimensions: expected {expected}, found {found} at point {index}")]
    MixedDimensions {
        expected: usize,
        found: usize,
        index: usize,
    },
    #[error("label {label} at point {index} is not 0 or 1")]
    BadLabel { label: i64, index: usize },
    #[error("non-finite coordinate at point {index}")]
    NonFinite { index: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("k = {k} exceeds the number of points n = {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("empty neighborhood")]
    EmptyNeighborhood,
    #[error("sliced schedule requires a density source and a query point")]
    MissingDensity,
    #[error("quadrature did not reach tolerance {tolerance:e} (estimate {estimate}, error {error:e})")]
    QuadratureFailure {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("degenerate sample: zero spread, cannot select a bandwidth")]
    DegenerateSample,
    #[error("could not bracket the balance equation in [1e-12, 1]")]
    NoBracket,
    #[error("rate fit requires strictly positive inputs")]
    NonPositiveInput,
    #[error("rate fit requires at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
