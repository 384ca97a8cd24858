use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("diameter {0} is below 3")]
    DiameterTooSmall(usize),
    #[error("{name}_{index} = {value} is not positive")]
    NonPositive {
        name: &'static str,
        index: usize,
        value: String,
    },
    #[error("c_1 = {0}, expected 1")]
    FirstCNotOne(String),
    #[error("b-list has {b} entries but c-list has {c}")]
    LengthMismatch { b: usize, c: usize },
    #[error("a_{index} = k - b_{index} - c_{index} = {value} is negative")]
    NegativeA { index: usize, value: String },

    #[error("eigenvalues not separated: gap {gap:e} between positions {i} and {j}")]
    EigenvaluesNotSeparated { i: usize, j: usize, gap: f64 },
    #[error("numerical breakdown: {0}")]
    Numerical(String),

    #[error("ordering is not a permutation of 0..={0} fixing 0")]
    BadOrdering(usize),
    #[error("sequence is not recurrent: {0}")]
    NotRecurrent(String),
    #[error("inconsistent parameters: {0}")]
    Inconsistent(String),
    #[error("reconstructed eigenvalue {value} at position {index} is not in the spectrum")]
    ReconstructionMismatch { index: usize, value: f64 },

    #[error("graph error: {0}")]
    Graph(String),
    #[error("graph has {n} vertices, above the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("graph is not distance-regular")]
    NotDistanceRegular,

    #[error("module decomposition failed: {0}")]
    Decomposition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
