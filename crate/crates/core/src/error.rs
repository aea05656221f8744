use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector length {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("Hermitian eigendecomposition did not converge for matrix:\n{dump}")]
    EigenNonConvergence { dump: String },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace {trace} is not 1")]
    InvalidTrace { trace: f64 },

    #[error("tangent is not traceless (trace {trace:e})")]
    NotTraceless { trace: f64 },

    #[error(
        "basepoint is not in the interior: min eigenvalue {min_eigenvalue:e} <= threshold {threshold:e}"
    )]
    SingularBasepoint { min_eigenvalue: f64, threshold: f64 },

    #[error("{what}: argument {value} outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid contrast generator at x = {x}: {reason}")]
    InvalidGenerator { x: f64, reason: &'static str },

    #[error("perturbation of size {eps} leaves the interior")]
    PerturbationLeavesInterior { eps: f64 },

    #[error("sample skipped: {reason}")]
    SkippedSample { reason: &'static str },

    #[error("no sampled interior point is mapped into the interior ({attempts} attempts)")]
    Condition1Violated { attempts: usize },

    #[error("no negative direction found: the map looks positive")]
    NotFound,

    #[error("adjoint image of the boundary projector vanishes (norm {norm:e})")]
    DegenerateAdjoint { norm: f64 },

    #[error("map is not Hermitian preserving (Choi residual {residual:e})")]
    NotHermitianPreserving { residual: f64 },

    #[error("unknown {kind} '{name}'; valid: {valid}")]
    UnknownName {
        kind: &'static str,
        name: String,
        valid: String,
    },

    #[error("invalid parameter '{name}': {message}")]
    InvalidParameter { name: String, message: String },

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {pointer}: {message}")]
    Parse { pointer: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            message: message.into(),
        }
    }

    pub(crate) fn parse(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}
