use thiserror::Error;

/// Errors raised by the metrology workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetroError {
    #[error("vertex {vertex} out of range for a {n}-vertex graph")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected; protocols require a connected graph")]
    Disconnected,

    #[error("two-vertex graph: leaf, root and true-twin roles coincide and the closed forms do not apply")]
    DegenerateGraph,

    #[error("vertex subset must be nonempty")]
    EmptySubset,

    #[error("size mismatch: expected {expected}, got {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("{what} size {n} exceeds the configured limit {limit}")]
    SizeLimit {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("invalid partition: {0}")]
    InvalidSpec(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operator is not Hermitian")]
    NonHermitian,

    #[error("single-qubit observable on qubit {0} has a degenerate spectrum")]
    DegenerateObservable(usize),

    #[error("stabilizer acts as identity on qubit {0}")]
    IdentityFactor(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rule table violation: {0}")]
    RuleTable(String),

    #[error("meta-stabilizer {0} is not a full-support stabilizer of the meta-graph")]
    RankDeficient(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl MetroError {
    /// Process exit code for the command-line front end:
    /// 1 validation, 2 size/limit.
    pub fn exit_code(&self) -> i32 {
        match self {
            MetroError::SizeLimit { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, MetroError>;
