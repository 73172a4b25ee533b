use thiserror::Error;

use crate::game::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game:\n{0}")]
    InvalidGame(ValidationReport),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("budget exceeded: strategy space of size {space} needs {required} evaluations, budget is {budget}")]
    BudgetExceeded {
        space: String,
        required: String,
        budget: u64,
    },

    #[error("size limit exceeded: {what} needs {required} entries, limit is {limit}")]
    SizeLimit {
        what: &'static str,
        required: String,
        limit: u64,
    },

    #[error("alpha {0} must lie strictly between 0 and 1")]
    InvalidAlpha(String),

    #[error("label {label} is reserved but appears in player {player}'s question alphabet")]
    ReservedLabel { label: String, player: usize },

    #[error("invalid rational literal {0:?} (expected \"num/den\")")]
    ParseRational(String),

    #[error("game is not anchored for the given anchor sets")]
    NotAnchored,

    #[error("conditioning on a zero-mass event: {0}")]
    ZeroMass(String),

    #[error("anchor event unreachable: no mass on W together with an all-anchor coordinate {coordinate}")]
    AnchorEventUnreachable { coordinate: usize },

    #[error("Pr(W_C) = 0 for C = {0:?}")]
    ZeroWinProbability(Vec<usize>),

    #[error("invalid coordinate set: {0}")]
    InvalidCoordinates(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
