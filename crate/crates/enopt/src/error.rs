use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A problem, series, or parameter set failed validation before any work ran.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An optimisation problem is malformed (undeclared variable, crossed bounds, ...).
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// A file could not be parsed; `row` is 1-based and counts the header.
    #[error("parse error in {path} at row {row}: {detail}")]
    Parse {
        path: String,
        row: usize,
        detail: String,
    },

    /// The model cannot be identified from the supplied data.
    #[error("unidentifiable model: {0}")]
    Unidentifiable(String),

    /// A regression design matrix is rank deficient; the message names the column.
    #[error("rank-deficient design matrix: {0}")]
    RankDeficient(String),

    /// The optimisation problem has no feasible point; the message names the
    /// first violated aggregate or step where known.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A solver stopped on its node, iteration, or time budget without a
    /// usable answer.
    #[error("solver limit reached: {0}")]
    SolverLimit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
