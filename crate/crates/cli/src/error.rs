use std::fmt::Display;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("computation failed: {0}")]
    Compute(#[from] tavis::Error),

    #[error("closed-form roots are degenerate (smallest gap {min_gap:e}); the closed form is undefined here, use the spectral propagator (mode = series) instead")]
    Degenerate { min_gap: f64 },

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn invalid(msg: impl Display) -> Self {
        Self::Invalid(msg.to_string())
    }

    /// 1 for bad input, 2 for anything that failed after validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invalid(_) => 1,
            Self::Compute(_) | Self::Degenerate { .. } | Self::Io(_) => 2,
        }
    }
}
