use thiserror::Error;

/// Errors raised by the library.
///
/// Non-convergence of the feasibility solver and "undecided" classifications
/// are results, not errors; they never show up here.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix or vector has a non-finite entry")]
    NonFinite,
    #[error("invalid state space: {0}")]
    InvalidSpace(String),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("operation requires a 2x2 two-qubit state, got dims {0:?}")]
    WrongSpace(Vec<usize>),
    #[error("bad bipartition: {0}")]
    BadBipartition(String),
    #[error("states are not linearly independent")]
    NotIndependent,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("operator is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("reference state is a product state")]
    PhiProduct,
    #[error("reference state is not maximally entangled (concurrence {0})")]
    NotMaxEnt(f64),
    #[error("state does not have the required form: {0}")]
    WrongForm(String),
    #[error("family parameters out of range: {0}")]
    ParamsOutOfRange(String),
    #[error("concurrence targets out of range: {0}")]
    TargetsOutOfRange(String),
    #[error("point outside the tetrahedron: {0}")]
    PointOutsideTetrahedron(String),
    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid discrimination instance: {0}")]
    InvalidInstance(String),
    #[error("count mismatch: {0}")]
    CountMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
