use thiserror::Error;

/// Errors raised by matrix, POVM, state and criterion operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("invalid subsystem index {index} for {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("subsystem selection must be non-empty and strictly increasing")]
    InvalidKeepSet,

    #[error("{routine} did not converge after {sweeps} sweeps")]
    NonConvergence {
        routine: &'static str,
        sweeps: usize,
    },

    #[error("parameter {name} = {value} outside allowed range: {reason}")]
    OutOfRange {
        name: String,
        value: f64,
        reason: String,
    },

    #[error("POVM is already renormalized")]
    AlreadyRenormalized,

    #[error("POVM is not a GSIC: {0}")]
    NotGsic(String),

    #[error("unknown state family '{0}'")]
    UnknownState(String),

    #[error("parameter constraint violated: {0}")]
    ParamConstraint(String),

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("malformed partition tree: {0}")]
    MalformedTree(String),

    #[error("invalid document: {0}")]
    Document(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
