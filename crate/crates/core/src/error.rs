use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed problem: {0}")]
    MalformedProblem(String),

    #[error("branch-and-bound node limit of {0} exceeded")]
    NodeLimitExceeded(usize),

    #[error("enumeration needs {needed} integer assignments, cap is {cap}")]
    EnumerationCapExceeded { needed: f64, cap: usize },

    #[error("simplex failed: {0}")]
    NumericalFailure(String),

    #[error("probabilities of {context} sum to {sum}, expected 1")]
    ProbabilityMismatch { context: String, sum: f64 },

    #[error("cut center {center:?} lies outside the state box")]
    CenterOutsideBox { center: Vec<f64> },

    #[error("stage problem infeasible at node {node} (stage {stage})")]
    StageInfeasible { node: usize, stage: usize },

    #[error("stage problem unbounded at node {node} (stage {stage})")]
    StageUnbounded { node: usize, stage: usize },

    #[error("cuts to aggregate do not share a center")]
    CenterMismatch,

    #[error("scenario tree would have {nodes} nodes, cap is {cap}")]
    NodeCapExceeded { nodes: f64, cap: usize },

    #[error("oracle failed: {0}")]
    OracleFailure(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
