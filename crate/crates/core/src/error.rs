use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-unique steady state (null-space dimension > 1, discrepancy {discrepancy:.3e})")]
    NonUniqueSteadyState { discrepancy: f64 },

    #[error("steady-state residual {residual:.3e} exceeds bound {bound:.3e}")]
    SteadyStateResidual { residual: f64, bound: f64 },

    #[error("integration failure at t = {t}: step size {step:.3e} underflowed")]
    IntegrationFailure { t: f64, step: f64 },

    #[error("density matrix invalid: {0}")]
    InvalidDensityMatrix(String),

    #[error("no single-excitation decoherence-free state: (2uwΔ)² + G_χ² = 0 with Ω_ψ ≠ 0")]
    NoSingleExcitationDfs,

    #[error("no double-excitation decoherence-free state without uΩc = wΩa (mismatch {mismatch:.3e})")]
    NoDoubleExcitationDfs { mismatch: f64 },

    #[error("phase-undefined: G_χ = 0 and Δ = 0")]
    PhaseUndefined,

    #[error("analytic dark-state formula not applicable: {0}")]
    DarkConditionsViolated(String),

    #[error("unknown state label: {0}")]
    UnknownLabel(String),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Numerical failures map to a distinct process exit code from input errors.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonUniqueSteadyState { .. }
                | Error::SteadyStateResidual { .. }
                | Error::IntegrationFailure { .. }
                | Error::InvalidDensityMatrix(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
