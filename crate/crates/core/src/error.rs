use thiserror::Error;

/// Errors produced by graph construction, queries, and estimation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("directed part contains a cycle")]
    CyclicGraph,
    #[error("wrong graph class: {0}")]
    WrongGraphClass(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("vertex `{0}` is not random")]
    NotRandom(String),
    #[error("vertex `{vertex}` is not fixable: {reason}")]
    NotFixable { vertex: String, reason: String },
    #[error("effect not identified: {0}")]
    NotIdentified(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("missing parameter for head {0}")]
    MissingParameter(String),
    #[error("empty data")]
    EmptyData,
    #[error("singular covariance: {0}")]
    SingularCovariance(String),
    #[error("matrix not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("incompatible strategy: {0}")]
    IncompatibleStrategy(String),
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("estimation failed: {0}")]
    Estimation(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
