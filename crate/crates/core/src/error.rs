use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m^H| = {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    ConvergenceFailure { sweeps: usize, residual: f64 },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("Fock cutoff {cutoff} too small, need at least {required}")]
    CutoffTooSmall { cutoff: usize, required: usize },

    #[error("cubic roots are degenerate (min |mu_k - mu_j| = {min_gap:e}); use the spectral propagator")]
    DegenerateRoots { min_gap: f64 },

    #[error("arccos argument {argument} outside [-1, 1]")]
    DomainError { argument: f64 },

    #[error("amplitude {amplitude:e} reached Fock level {level} near the cutoff")]
    TruncationLeak { level: usize, amplitude: f64 },
}
