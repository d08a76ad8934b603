use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation requires an undirected graph; symmetrize first")]
    DirectedInput,

    #[error("matrix is not symmetric (max |L - L^T| = {max_asymmetry:e})")]
    NonSymmetric { max_asymmetry: f64 },

    #[error("symmetric eigensolver did not converge within {max_iterations} iterations")]
    ConvergenceFailure { max_iterations: usize },

    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },

    #[error("node {node} out of range for graph with {n} nodes")]
    InvalidNode { node: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("exhaustive cut enumeration supports at most {max} nodes, got {n}")]
    TooLarge { n: usize, max: usize },

    #[error("no candidate edges: every admissible node pair is already connected")]
    NoCandidateEdges,

    #[error("natural frequencies are not centered (sum = {sum:e})")]
    UncenteredOmega { sum: f64 },

    #[error("quantile {0} is outside the open interval (0, 1)")]
    InvalidQuantile(f64),

    #[error("desynchronization report has no flagged pairs")]
    EmptyReport,

    #[error("fan-out k = {k} must satisfy 2 <= k <= {n}")]
    InvalidFanOut { k: usize, n: usize },

    #[error("oscillator state became non-finite at t = {time}; reduce the step size")]
    NonFiniteState { time: f64 },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
