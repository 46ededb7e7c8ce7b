use thiserror::Error;

pub type Result<T> = std::result::Result<T, GraphError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("vertex {index} out of range for graph with {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graphs differ in order: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("{n} vertices exceeds the exhaustive search limit of {limit}")]
    SizeLimit { n: usize, limit: usize },

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("empty ensemble")]
    EmptyEnsemble,
}

impl GraphError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        GraphError::InvalidParameter(msg.into())
    }
}
