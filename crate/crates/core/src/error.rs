use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("subsystem layout {layout:?} is inconsistent: {reason}")]
    BadLayout { layout: Vec<usize>, reason: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("integration step too large: trace drifted by {drift:.3e}")]
    StepTooLarge { drift: f64 },

    #[error("Fock truncation leak: population {population:.3e} in the top photon level")]
    TruncationLeak { population: f64 },

    #[error("spectrum of rho*rho_sf has imaginary part {0:.3e}")]
    NonRealSpectrum(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
