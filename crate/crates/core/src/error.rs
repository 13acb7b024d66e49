use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid reward: {0}")]
    InvalidReward(String),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("payoff {payoff} is not defined for model kind {model}")]
    PayoffModelMismatch { payoff: String, model: String },
    #[error("stock numeraire requires a single asset, got d = {0}")]
    StockNumeraireDimension(usize),
    #[error("cannot step past the final grid time (t_index = {0})")]
    PastFinalTime(usize),
    #[error(
        "reward sample at t_index {t_index} has ties across bin {bin}; \
         the coerced bins would not interleave"
    )]
    DegenerateBins { t_index: usize, bin: usize },
    #[error("process does not expose exact one-step transition laws")]
    ExactExpectationUnavailable,
    #[error("coercion artifact: {0}")]
    Artifact(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
