use std::path::PathBuf;

/// Everything that can go wrong between loading a city model and writing an
/// impact map.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grids are not aligned: {0}")]
    MisalignedGrids(String),
    #[error("building {id}: invalid footprint: {reason}")]
    InvalidPolygon { id: String, reason: String },
    #[error("building {id}: {reason}")]
    InvalidBuilding { id: String, reason: String },
    #[error("unknown building id {0}")]
    UnknownBuilding(String),
    #[error("invalid edit: {0}")]
    InvalidEdit(String),
    #[error("building {0} has no viewpoints")]
    NoViewpoints(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("metric registry mismatch: missing {missing:?}, extra {extra:?}")]
    RegistryMismatch { missing: Vec<String>, extra: Vec<String> },
    #[error("invalid scorer: {0}")]
    InvalidScorer(String),
    #[error("driver ranking requires linear scorer")]
    RankingRequiresLinear,
    #[error("design matrix is rank deficient; collinear columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },
    #[error("too few observations: n = {n}, design width = {k}")]
    TooFewObservations { n: usize, k: usize },
    #[error("missing attribute {0}")]
    MissingAttribute(String),
    #[error("unknown agglomeration {0}")]
    UnknownAgglomeration(String),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("scenario {0} has no modified building")]
    NoModifiedBuilding(String),
    #[error("empty evaluation window")]
    EmptyWindow,
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// Process exit code for the command-line front end: 2 for input
    /// validation, 3 for numerical failure, 4 for internal errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::RankDeficient { .. } | Error::TooFewObservations { .. } => 3,
            Error::Internal(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
