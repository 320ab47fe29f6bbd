use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not constructible: {0}")]
    NotConstructible(String),

    #[error("vectors do not span R^{dim} (numerical rank {rank})")]
    DegenerateSystem { dim: usize, rank: usize },

    #[error("state is not the maximally entangled vector (deviation {deviation:e})")]
    NotMaximallyEntangled { deviation: f64 },

    #[error("not a correlation matrix: {0}")]
    NotCorrelationMatrix(String),

    #[error("binary outcomes required, got |A|={a}, |B|={b}")]
    WrongOutcomeCount { a: usize, b: usize },

    #[error("diagonal entry {index} is not positive ({value:e})")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solver failure: {0}")]
    SolverFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
