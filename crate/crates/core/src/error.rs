use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: parse error at line {line}, column {column} (field `{field}`): {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        field: String,
        message: String,
    },

    #[error("unresolved reference to {kind} `{id}` ({context})")]
    UnknownReference {
        kind: &'static str,
        id: String,
        context: String,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("network graph contains a cycle through `{0}`")]
    Cycle(String),

    #[error("topology variant breaks conservation: {0}")]
    Conservation(String),

    #[error("inconsistent big-M data on {0}")]
    BigM(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("column `{name}` is not integral (value {value})")]
    Integrality { name: String, value: f64 },

    #[error("numerical instability: residual {residual:e} after refactorization")]
    NumericalInstability { residual: f64 },

    #[error("brute-force oracle limited to {limit} free binaries, program has {actual}")]
    TooManyBinaries { limit: usize, actual: usize },

    #[error("LP relaxation is unbounded")]
    Unbounded,

    #[error("simplex iteration limit {0} reached")]
    IterationLimit(usize),

    #[error("solution file line {line}: {message}")]
    Solution { line: usize, message: String },

    #[error("lead time must be positive under the log-normal model, got {0}")]
    NonPositiveLeadTime(f64),

    #[error("simulation: {0}")]
    Simulation(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
