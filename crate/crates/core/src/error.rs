use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet mismatch: {left:?} vs {right:?}")]
    AlphabetMismatch { left: String, right: String },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("symbol {0:?} is not in the alphabet")]
    UnknownSymbol(char),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("the shift is empty after pruning")]
    EmptyShift,

    #[error("the shift is finite (a single cycle)")]
    FiniteShift,

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("size budget exceeded: {requested} symbols requested, budget {budget}")]
    BudgetExceeded { requested: u128, budget: usize },

    #[error("no one-sided fixed point starts with {0:?}")]
    NoFixedPoint(char),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("construction invariant violated: {0}")]
    ConstructionInvariant(String),

    #[error("ladder construction failed: {0}")]
    LadderFailure(String),

    #[error("ladder too shallow: depth {needed} needed, {available} available")]
    Depth { needed: usize, available: usize },

    #[error("trace invalid at step {step}: {detail}")]
    TraceInvalid { step: usize, detail: String },

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    #[error("stream recipe is not replayable: {0}")]
    NotReplayable(String),
}
