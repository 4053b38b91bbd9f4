use std::fmt;

use thiserror::Error;

/// Which side of a table an index or subset refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Row,
    Col,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Row => f.write_str("row"),
            Axis::Col => f.write_str("column"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("table has no rows or no columns")]
    EmptyTable,
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("negative entry at row {row}, column {col}")]
    NegativeEntry { row: usize, col: usize },
    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("{axis} {index} sums to zero")]
    ZeroMarginal { axis: Axis, index: usize },
    #[error("{axis} index {index} out of range (size {len})")]
    IndexOutOfRange { axis: Axis, index: usize, len: usize },
    #[error("{axis} subset is empty")]
    EmptySubset { axis: Axis },
    #[error("{axis} subset is not contained in its block")]
    SubsetNotContained { axis: Axis },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("work budget exceeded: {required} required, budget {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("invalid k = {k}: must satisfy 1 <= k <= {max}")]
    InvalidK { k: usize, max: usize },
    #[error("singular value iteration did not converge in {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },
    #[error("singular value {value} lies outside [0, 1] beyond tolerance")]
    SpectralRange { value: f64 },
    #[error("partition cannot be refined: {0}")]
    NotRefinable(String),
    #[error("bad marginals: {0}")]
    BadMarginals(String),
    #[error("bad block specification: {0}")]
    BadBlockSpec(String),
    #[error("generation failed: {0}")]
    GenerationFailure(String),
    #[error("no admissible sample after {retries} attempts")]
    RetriesExhausted { retries: usize },
    #[error("sampling failed: {0}")]
    SamplingExhausted(String),
    #[error("table is not a 0-1 array: entry ({row}, {col})")]
    NotBinary { row: usize, col: usize },
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
