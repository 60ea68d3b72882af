use thiserror::Error;

use crate::set::ItemSet;

/// Errors raised while building or evaluating choice and exclusion functions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ground set: {0}")]
    InvalidGround(String),

    #[error("set {set} is not contained in a ground set of size {size}")]
    Domain { set: ItemSet, size: usize },

    #[error("functions are defined over different ground sets ({left} vs {right} items)")]
    GroundMismatch { left: usize, right: usize },

    #[error("table has no entry for {0}")]
    MissingTableEntry(ItemSet),

    #[error("invalid linear order: {0}")]
    InvalidOrder(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("not enough free items: needed {needed}, found {available}")]
    InsufficientHeadroom { needed: usize, available: usize },

    #[error("enumeration of {count} candidates exceeds cap {cap}")]
    EnumerationCapExceeded { count: usize, cap: usize },

    #[error("sampling budget of {0} draws exhausted")]
    SamplingBudgetExceeded(usize),

    #[error("exhaustive budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("expected {expected} exclusions for {choices} choice functions, got {got}")]
    ArityMismatch {
        choices: usize,
        expected: usize,
        got: usize,
    },

    #[error("reserve sets are not nested: position {0} is not contained in its predecessor")]
    NestingViolation(usize),

    #[error("condition {0} is not violated")]
    ConditionNotViolated(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("construction did not produce a valid witness: {0}")]
    WitnessInvalid(String),

    #[error("property requires an equivalence partition")]
    MissingPartition,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
