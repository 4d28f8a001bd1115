use thiserror::Error;

use crate::minimax::MinimaxSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("normal equations are numerically singular (retry with ridge > 0)")]
    SingularNormalEquations,

    #[error("subproblem has {rows} rows but at most {limit} are allowed")]
    SubproblemTooLarge { rows: usize, limit: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The Chebyshev LP is bounded below by zero, so this signals a solver bug.
    #[error("linear program reported unbounded")]
    Unbounded,

    #[error("column generation hit the iteration cap ({} iterations) without certifying optimality", .0.iterations)]
    IterationCapReached(Box<MinimaxSolution>),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate conic: surviving points do not determine a conic")]
    DegenerateConic,

    #[error("{path}: line {line}: {msg}")]
    Parse { path: String, line: u64, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by the caller's input rather than by the
    /// numerical machinery.
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::InvalidInput(_)
                | Error::NonFinite { .. }
                | Error::SingularNormalEquations
                | Error::InsufficientData(_)
                | Error::DegenerateConic
                | Error::Parse { .. }
                | Error::Io(_)
                | Error::Csv(_)
        )
    }
}
