use thiserror::Error;

/// Errors raised by the numerics and the structure decomposers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix not Hermitian (||H - H^dagger||_F = {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("state does not saturate {identity}: {detail}")]
    NotSaturated { identity: String, gap: f64, detail: String },

    #[error("structure verification failed in {stage}: residual {residual:.3e}")]
    StructureVerificationFailed { stage: String, residual: f64 },

    #[error("block refinement exhausted after {depth} levels; worst block largest eigenvalue {worst_purity:.12}")]
    RefinementExhausted { depth: usize, worst_purity: f64 },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("schema error at {path}: {detail}")]
    Schema { path: String, detail: String },

    #[error("invariant violated in field {field}: {detail}")]
    FileInvariant { field: String, detail: String },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 1 input, 2 not saturated, 3 verification, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotSaturated { .. } => 2,
            Error::StructureVerificationFailed { .. } | Error::RefinementExhausted { .. } => 3,
            Error::Internal(_) => 4,
            _ => 1,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn verification(stage: impl Into<String>, residual: f64) -> Self {
        Error::StructureVerificationFailed {
            stage: stage.into(),
            residual,
        }
    }
}
