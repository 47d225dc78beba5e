use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library reports. The variant name is what the CLI
/// prints on an input error, so keep them stable.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {n} is below the minimum of 2 paths")]
    TooFewPaths { n: usize },

    #[error("matrix is not Hermitian: max |rho_jk - conj(rho_kj)| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace} instead of 1 (deviation {deviation:e})")]
    TraceNotOne { trace: f64, deviation: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("bad path probabilities: {0}")]
    BadProbabilities(String),

    #[error("operation needs n = {expected}, got n = {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("expected a list of length {expected}, got {got}")]
    BadLength { expected: usize, got: usize },

    #[error("matrix is not a Fourier matrix (unitarity residual {unitarity:e}, modulus residual {modulus:e})")]
    NotFourier { unitarity: f64, modulus: f64 },

    #[error("gains must satisfy 1 = g1 > g2 >= ... >= gn: {0}")]
    GainOrderViolated(String),

    #[error("gains must sum to zero, got {sum:e}")]
    GainSumNonzero { sum: f64 },

    #[error("unknown or malformed measure '{0}'")]
    BadMeasure(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("brute-force scan supports n <= 4, got n = {n}")]
    TooLarge { n: usize },

    #[error("dimension n = {n} is outside the supported range {min}..={max}")]
    BadN { n: usize, min: usize, max: usize },

    #[error("no wave-mode runs supplied")]
    EmptyRuns,

    #[error("malformed JSON: {0}")]
    Json(String),
}

impl Error {
    /// Short variant name, e.g. `NotPositive`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::TooFewPaths { .. } => "TooFewPaths",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::TraceNotOne { .. } => "TraceNotOne",
            Error::NotPositive { .. } => "NotPositive",
            Error::BadProbabilities(_) => "BadProbabilities",
            Error::WrongDimension { .. } => "WrongDimension",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::BadLength { .. } => "BadLength",
            Error::NotFourier { .. } => "NotFourier",
            Error::GainOrderViolated(_) => "GainOrderViolated",
            Error::GainSumNonzero { .. } => "GainSumNonzero",
            Error::BadMeasure(_) => "BadMeasure",
            Error::BadParameter(_) => "BadParameter",
            Error::TooLarge { .. } => "TooLarge",
            Error::BadN { .. } => "BadN",
            Error::EmptyRuns => "EmptyRuns",
            Error::Json(_) => "Json",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
