use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("could not parse input: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("polytope is not full-dimensional (affine rank {rank} in R^{dim})")]
    DegeneratePolytope { rank: usize, dim: usize },

    #[error("rank {rank} exceeds the vertex enumeration cap {cap}")]
    RankCapExceeded { rank: usize, cap: usize },

    #[error("point is not on the zonotope boundary (residual {residual:.3e})")]
    NotOnBoundary { residual: f64 },

    #[error("lift is not unique: free generators {free:?} are linearly dependent")]
    NonUniqueLift { free: Vec<usize> },

    #[error("point lies outside the polytope (excess {excess:.3e})")]
    PointOutsidePolytope { excess: f64 },

    #[error("face has codimension zero; its affine hull is the whole space")]
    CodimZeroFace,

    #[error("smooth term is degenerate at this zonotope (codimension-0 face)")]
    DegenerateFace,

    #[error("generator submatrix is singular: {0:?}")]
    SingularSubmatrix(Vec<usize>),

    #[error("locality conditions do not hold: {0}")]
    LocalityViolation(String),

    #[error("linear program failed to converge: {0}")]
    LpNumericalFailure(String),

    #[error("iteration limit {0} reached")]
    IterationLimit(usize),

    #[error("Chebyshev region is empty")]
    InfeasibleRegion,

    #[error("Chebyshev region is unbounded")]
    UnboundedRegion,

    #[error("direction does not improve pair {0}")]
    NonImprovingRow(usize),

    #[error("no step limits supplied")]
    EmptyTaus,

    #[error("no local perturbation found after {0} tries")]
    PerturbationBudgetExceeded(usize),

    #[error("warmstart requires d = 2 (got {0})")]
    DimensionNot2(usize),

    #[error("polygon is not centrally symmetric (deviation {0:.3e})")]
    AsymmetryTooLarge(f64),

    #[error("degenerate warmstart input: {0}")]
    DegenerateInput(String),

    #[error("descent aborted at iteration {iter}: {reason}")]
    DescentAborted { iter: usize, reason: String },
}
