use thiserror::Error;

use crate::lattice::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("arity must be at least 1")]
    ZeroArity,

    #[error("arity {k} exceeds the configured cap of {cap}")]
    ArityCapExceeded { k: usize, cap: usize },

    #[error("domain is empty")]
    EmptyDomain,

    #[error("invalid cube: {0}")]
    InvalidCube(String),

    #[error("cube E^k is not contained in the domain (missing {missing})")]
    CubeNotContained { missing: Point },

    #[error("domain is not capped by the cube")]
    NotCapped,

    #[error("point {0} is not in the domain")]
    PointNotInDomain(Point),

    #[error("edge {from} -> {to} violates the downward condition")]
    DownwardViolation { from: Point, to: Point },

    #[error("vertex {vertex} needs {tuples} committee tuples, cap is {cap}")]
    TupleBudgetExceeded { vertex: Point, tuples: u128, cap: u64 },

    #[error("rho({point}) = {value} is below min = {min}")]
    MinDominanceViolation { point: Point, value: u64, min: u64 },

    #[error("{candidates} candidate cubes exceed the cap of {cap}")]
    CandidateBudgetExceeded { candidates: u128, cap: u64 },

    #[error("instance has {size} elements, solver cap is {cap}")]
    SolverBudgetExceeded { size: usize, cap: usize },

    #[error("invalid instance set: {0}")]
    InvalidInstance(String),

    #[error("structured solver refused the instance: {0}")]
    SolverRefused(String),

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
