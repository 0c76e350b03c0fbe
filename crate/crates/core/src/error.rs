use thiserror::Error;

/// Errors raised by the library. Verdict-level uncertainty is not an error;
/// it is reported through [`crate::Decision::Indeterminate`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: symmetry residual {residual:e}")]
    NotHermitian { residual: f64 },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("tuples of different arity: {0} vs {1}")]
    MixedArity(usize, usize),
    #[error("matrix is not an isometry: residual {0:e}")]
    NotIsometry(f64),
    #[error("problem of real dimension {size} exceeds cap {cap}")]
    DimensionCap { size: usize, cap: usize },
    #[error("ill-formed instance: {0}")]
    IllFormed(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("outcome carries neither witness nor certificate")]
    MissingEvidence,
    #[error("directions do not positively span the space")]
    DegenerateDirections,
    #[error("degenerate polytope: {0}")]
    DegeneratePolytope(String),
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("structure theorems disagree: {0}")]
    InconsistentTheorems(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
