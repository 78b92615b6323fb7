use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be non-empty")]
    EmptyMatrix,

    #[error("non-finite coefficient at ({row}, {col})")]
    NonFiniteCoefficient { row: usize, col: usize },

    #[error("bit index {index} out of range for {len} variables")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid weight vector: {0}")]
    InvalidWeight(&'static str),

    #[error("instance needs at least 2 objectives, found {0}")]
    TooFewObjectives(usize),

    #[error("invalid instance metadata: {0}")]
    InvalidInstance(&'static str),

    #[error("invalid solver parameter: {0}")]
    InvalidParams(&'static str),

    #[error("the solver returned no solutions")]
    EmptySolverResult,

    #[error("simplex lattice of degree 0 is undefined for {0} objectives")]
    DegenerateLattice(usize),

    #[error("no lattice degree yields {requested} weights for {m} objectives; achievable counts: {achievable:?}")]
    UnreachableWeightCount {
        requested: usize,
        m: usize,
        achievable: Vec<usize>,
    },

    #[error("method requires {required} objectives, instance has {found}")]
    ObjectiveCountMismatch { required: usize, found: usize },

    #[error("method needs at least {required} weights, got {found}")]
    TooFewWeights { required: usize, found: usize },

    #[error("need at least 2 weight records, found {0}")]
    TooFewRecords(usize),

    #[error("no progress possible: every candidate pair is degenerate or already explored")]
    NoProgress,

    #[error("unsupported objective count {0} (hypervolume supports 2 to 4)")]
    UnsupportedObjectiveCount(usize),

    #[error("correlation {rho} is infeasible for {m} objectives: the correlation matrix is only positive semidefinite for rho >= -1/(m-1) = {bound}")]
    InfeasibleCorrelation { rho: f64, m: usize, bound: f64 },

    #[error("attainment level {level} outside 1..={runs}")]
    InvalidLevel { level: usize, runs: usize },

    #[error("at least one run front is required")]
    NoRuns,
}
