use thiserror::Error;

/// Errors raised anywhere in the pipeline, from ingestion to evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row} in table '{table}' has {got} fields, expected {expected}")]
    Ingest {
        table: String,
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("projection target shares no variables with the factor schema")]
    EmptyProjection,
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("head variable '{0}' does not occur in the body")]
    UnsafeHead(String),
    #[error("unknown relation '{0}'")]
    UnknownRelation(String),
    #[error("atom over '{relation}' has arity {got}, relation has arity {expected}")]
    ArityMismatch {
        relation: String,
        got: usize,
        expected: usize,
    },
    #[error("variable '{0}' is not range-restricted (no positive atom or domain declaration)")]
    RangeRestriction(String),
    #[error("planning budget exceeded: {vertices} vertices > cap {cap}")]
    PlanningBudgetExceeded { vertices: usize, cap: usize },
    #[error("vertex '{0}' is not covered by any hyperedge")]
    InfeasibleCover(String),
    #[error("quotient enumeration budget exceeded: |U| = {0}")]
    QuotientBudgetExceeded(usize),
    #[error("chromatic enumeration budget exceeded: {0} candidate colorings")]
    ChromaticBudgetExceeded(u128),
    #[error("invalid color distribution: {0}")]
    InvalidDistribution(String),
    #[error("family construction failed after {retries} resamples; increase the size multiplier")]
    FamilyConstructionFailed { retries: usize },
    #[error("candidate pool cannot cover proper coloring {0:?}")]
    CoverageGap(Vec<u32>),
    #[error("no feasible inner alphabet within budget (need a prime power q >= {need})")]
    ExplicitBudgetExceeded { need: usize },
    #[error("construction bug: {0}")]
    ConstructionBug(String),
    #[error("plan error: {0}")]
    PlanError(String),
    #[error("evaluation budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("reed-solomon parameters violated: need 1 <= d <= n <= q, got d={d}, n={n}, q={q}")]
    RsParams { d: usize, n: usize, q: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
