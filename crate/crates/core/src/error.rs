use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveSemidefinite { min_eig: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eig:.3e}, threshold {threshold:.3e})")]
    NotPositiveDefinite { min_eig: f64, threshold: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("iterate is not interior: {0}")]
    NotInterior(String),

    #[error("Newton system is singular (reciprocal condition {rcond:.3e})")]
    SingularSystem { rcond: f64 },

    #[error("no strictly feasible step after {count} backtracks")]
    BacktrackExhausted { count: usize },

    #[error("Newton corrector did not converge after {steps} steps (residual {residual:.3e})")]
    NoConvergence { steps: usize, residual: f64 },

    #[error("rank of G(x*) is ambiguous: eigenvalue {eigenvalue:.3e} within a decade of cutoff {cutoff:.3e}")]
    RankAmbiguous { eigenvalue: f64, cutoff: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unknown instance `{0}`")]
    UnknownInstance(String),

    #[error("parse error in `{field}`: {msg}")]
    Parse { field: String, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
