use thiserror::Error;

/// Errors raised by the geometry kernel and everything built on top of it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("set is empty")]
    EmptySet,
    #[error("set is unbounded in the requested direction")]
    Unbounded,
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("point lies outside the box")]
    PointOutsideBox,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("image of the disturbance set has no exact H-representation")]
    ImageNotExact,
    #[error("seed set is not controlled invariant")]
    SeedNotInvariant,
    #[error("iterate has {rows} rows after reduction (limit {limit})")]
    RowBlowup { rows: usize, limit: usize },
    #[error("maximal controlled invariant set is empty")]
    EmptyInvariant,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("Riccati iteration did not converge in {0} iterations")]
    RiccatiDiverged(usize),
    #[error("disturbance script too short: need {needed}, have {have}")]
    ScriptExhausted { needed: usize, have: usize },
    #[error("no state found in the difference of the two invariant sets")]
    NoGapFound,
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
