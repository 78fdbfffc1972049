use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Location and verdict of a failed membership check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub node: usize,
    pub time_index: usize,
    pub space_index: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input in {0}")]
    NonFinite(&'static str),
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("aligned pair: |a|^2|b|^2 = (a.b)^2")]
    Alignment,
    #[error("state is not on the constraint set (|M - F(v)| = {0:e})")]
    NotOnConstraintSet(f64),
    #[error("empty ball family")]
    EmptyBallFamily,
    #[error("decomposition infeasible at current atom sampling (residual {0:e})")]
    InfeasibleAtSampling(f64),
    #[error("state is not strictly inside the hull")]
    NotInside,
    #[error("jet table incomplete: need order {need}, have {have}")]
    JetOrder { need: usize, have: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no active cubes at threshold {0:e}")]
    NoActiveCubes(f64),
    #[error("hard failure: {detail}")]
    HardFailure { detail: String, witness: Option<Witness> },
    #[error("midpoint failure at dyadic index {index}/{denominator}: {source}")]
    Midpoint {
        index: u64,
        denominator: u64,
        #[source]
        source: Box<Error>,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
