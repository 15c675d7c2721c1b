use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid atom: {0}")]
    InvalidAtom(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid intensity: {0}")]
    InvalidIntensity(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid functional: {0}")]
    InvalidFunctional(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("stick-breaking truncation: {atoms} atoms drawn, remainder {remainder:e} above tolerance {tolerance:e}")]
    Truncation {
        atoms: usize,
        remainder: f64,
        tolerance: f64,
    },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("quadrature did not converge: refinement changed the value by {0:e}")]
    Quadrature(f64),
    #[error("output: {0}")]
    Output(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Output(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Output(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
