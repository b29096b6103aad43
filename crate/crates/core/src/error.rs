use thiserror::Error;

pub type Result<T> = std::result::Result<T, QplexError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QplexError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ragged or malformed array: {0}")]
    Ragged(String),
    #[error("operator is not Hermitian (max |A - A†| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("operator is not positive (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace is not one (trace {trace})")]
    TraceNotOne { trace: f64 },
    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("effect {index} has eigenvalue {eigenvalue:e} outside [0, 1]")]
    EffectNotPositive { index: usize, eigenvalue: f64 },
    #[error("effects do not sum to the identity (max deviation {deviation:e})")]
    SumNotIdentity { deviation: f64 },
    #[error("POVM has no effects")]
    EmptyPovm,
    #[error("Born probability {value} outside [0, 1]")]
    ProbabilityOutOfRange { value: f64 },
    #[error("orbit is not equiangular (max deviation {deviation:e})")]
    NotEquiangular { deviation: f64 },
    #[error("effect {index} is not a rank-one operator with trace 1/d ({reason})")]
    NotSicEffect { index: usize, reason: String },
    #[error("POVM is not informationally complete (rank {rank} < {required})")]
    NotInformationallyComplete { rank: usize, required: usize },
    #[error("SIC search did not converge (best potential {potential}, deviation {deviation:e})")]
    NotConverged { potential: f64, deviation: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("not a probability vector: {0}")]
    NotProbVector(String),
    #[error("column {column} of the conditional matrix is not a distribution: {reason}")]
    NotColumnStochastic { column: usize, reason: String },
    #[error("urgleichung parameters violate alpha - N*beta = 1 (alpha {alpha}, beta {beta}, N {n})")]
    InvalidParams { alpha: f64, beta: f64, n: usize },
    #[error("inconsistent pair: output {index} is {value:e} < 0")]
    InconsistentPair { index: usize, value: f64 },
    #[error("probability vector maps outside state space (min eigenvalue {min_eigenvalue:e})")]
    NotAState { min_eigenvalue: f64 },
    #[error("states span a degenerate subspace (|<psi|psi'>| = {overlap})")]
    DegenerateSubspace { overlap: f64 },
    #[error("overlap violation: dot product {dot:e} <= 0 (subspace rank {subspace_rank:?})")]
    OverlapViolation { dot: f64, subspace_rank: Option<usize> },
    #[error("saturation graph has {count} vertices, exceeding the exact-search budget {budget}")]
    TooManyCandidates { count: usize, budget: usize },
    #[error("samples do not span the Hermitian space (rank {rank} < {required})")]
    InsufficientSpan { rank: usize, required: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
