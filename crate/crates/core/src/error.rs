use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("edge {{{0}, {1}}} does not exist")]
    MissingEdge(usize, usize),
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
    #[error("instance too large: {what} = {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("index {k} out of range (size {size})")]
    OutOfRange { k: usize, size: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("privacy budget exceeded for node {node}: spent {spent} + {request} > {total}")]
    BudgetExceeded {
        node: usize,
        spent: f64,
        request: f64,
        total: f64,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
