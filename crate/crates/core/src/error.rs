use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix market parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {msg}")]
    InvalidParameter { name: &'static str, msg: String },

    #[error("zero pivot in ILU(0) factorization at row {row}")]
    ZeroPivot { row: usize },

    #[error("column {col} is empty; column equilibration impossible")]
    ZeroColumn { col: usize },

    #[error("Cholesky breakdown: first pivot {pivot:e} is not positive")]
    CholeskyBreakdown { pivot: f64 },

    #[error("block orthogonalization broke down: no new column could be accepted")]
    BlockBreakdown,

    #[error("breakdown fallback exhausted: {0}")]
    FallbackExhausted(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("zero diagonal entry in triangular factor at column {col}")]
    SingularTriangle { col: usize },

    #[error("Hessenberg QR iteration failed to converge for eigenvalue {index}")]
    EigenNoConvergence { index: usize },

    #[error("not enough Ritz values: need {needed}, have {have}")]
    NotEnoughRitzValues { needed: usize, have: usize },

    #[error("unknown problem specification `{0}`")]
    ProblemSpec(String),

    #[error("trace mismatch: {0}")]
    TraceMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            msg: msg.into(),
        }
    }
}
