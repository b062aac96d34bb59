use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: vertex {index} is out of range for n = {n}")]
    IndexOverflow { line: usize, index: usize, n: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("alpha = {alpha} must exceed half the largest Laplacian eigenvalue ({bound})")]
    AlphaTooSmall { alpha: f64, bound: f64 },
    #[error("mixing matrix certification failed: {0}")]
    Certification(String),
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not symmetric positive semidefinite")]
    NotPositiveSemidefinite,
    #[error("box bounds are inverted at coordinate {0}")]
    InvertedBox(usize),
    #[error("power iteration did not converge in {0} iterations")]
    NoConvergence(usize),
    #[error("step size rejected: {0}")]
    InadmissibleStep(String),
    #[error("metric is not positive definite (tau*sigma*|K|^2 = {0})")]
    MetricNotPositiveDefinite(f64),
    #[error("linear operator K must be the identity")]
    NotIdentity,
    #[error("Lipschitz constant must be positive, got {0}")]
    NonPositiveLipschitz(f64),
    #[error("{0}")]
    Unsupported(String),
    #[error("agent {reader} read a value from non-neighbor {source_agent} on block {block}")]
    Locality {
        block: usize,
        reader: usize,
        source_agent: usize,
    },
    #[error("config field `{field}`: {msg}")]
    Config { field: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            msg: msg.into(),
        }
    }
}
