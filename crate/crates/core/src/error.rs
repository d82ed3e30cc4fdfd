use thiserror::Error;

/// Errors raised by the control toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symplectic: |S^T J S - J|_F = {residual:e}")]
    NotSymplectic { residual: f64 },

    #[error("matrix is not unitary: |U^H U - I|_F = {residual:e}")]
    NotUnitary { residual: f64 },

    #[error("non-finite or overflowing entries in {0}")]
    NonFinite(&'static str),

    #[error("symplecticity drift {residual:e} at propagation step {step} (under-resolved exponential)")]
    SymplecticDrift { step: usize, residual: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("singular spectrum is not reciprocal; input is not symplectic")]
    NonReciprocalSpectrum,

    #[error("flavor mismatch: {0}")]
    FlavorMismatch(String),

    #[error("Lie closure did not converge within {0} rounds")]
    ClosureNotConverged(usize),

    #[error("point is not critical: residual {0:e}")]
    NotCritical(f64),

    #[error("gradient flow step size underflow at s = {s} (stiff dynamics)")]
    Stiffness { s: f64 },

    #[error("unknown gate '{0}'")]
    UnknownGate(String),

    #[error("unknown model '{0}'")]
    UnknownModel(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
