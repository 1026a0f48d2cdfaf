use thiserror::Error;

/// Errors produced by model construction and the modal analyses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModalError {
    #[error("non-finite value in {what}")]
    NonFinite { what: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("inertia of machine {machine} is not strictly positive ({value})")]
    SingularM { machine: usize, value: f64 },

    #[error("energy weight P is singular")]
    SingularP,

    #[error(
        "state matrix is defective: mode {mode} has |u^T v| = {overlap:.3e} below tolerance {tol:.1e}; the modal expansion does not exist"
    )]
    DefectiveMatrix { mode: usize, overlap: f64, tol: f64 },

    #[error("state is too close to the origin (|x|_P = {norm:.3e})")]
    NearZeroState { norm: f64 },

    #[error("state matrix has zero Frobenius norm")]
    ZeroMatrix,

    #[error("physical energy requested but the energy weight P is not symmetric positive definite")]
    RefusedIndefiniteP,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("state became non-finite at t = {time}")]
    Overflow { time: f64 },
}

impl ModalError {
    pub(crate) fn non_finite(what: impl Into<String>) -> Self {
        ModalError::NonFinite { what: what.into() }
    }
}

pub type Result<T, E = ModalError> = std::result::Result<T, E>;
