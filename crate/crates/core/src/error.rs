//! Error type shared by every module of the crate.

/// Classifies an error for exit-code mapping at the CLI boundary.
///
/// Validation errors are bad inputs (exit 1), computation errors are failures
/// of a numerical procedure on valid inputs (exit 2), and I/O errors are
/// filesystem problems (exit 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Computation,
    Io,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Particle speed at or above the speed of light.
    #[error("relativistic domain error: v0 = {v0:.6e} m/s is not below c")]
    Relativistic { v0: f64 },

    /// A derived quantity diverges for this input (e.g. zero velocity).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Effective-photon denominator reached or crossed its pole.
    #[error("effective-photon pole: beta*f(I) = {coupling:.6} >= 1 at intensity {intensity:.6e} W/m^2")]
    Pole { coupling: f64, intensity: f64 },

    /// First-order probability exceeded 1; the perturbative result is invalid.
    #[error("perturbation breakdown: probability {probability:.6e} exceeds 1")]
    PerturbationBreakdown { probability: f64 },

    /// An asymptotic form was requested outside its validity region.
    #[error("asymptotic form invalid: delta_omega*t = {phase:.6e} < {required}; use the exact or series branch")]
    AsymptoticValidity { phase: f64, required: f64 },

    /// A factor of the matrix element diverges.
    #[error("singularity: {0}")]
    Singularity(String),

    /// An iterative solver used up its iteration budget.
    #[error("no convergence after {iterations} iterations (last residual {residual:.6e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Adaptive step size underflowed during integration.
    #[error("integration stalled at t = {t:.6e} with step {step:.6e}: {detail}")]
    Stiffness { t: f64, step: f64, detail: String },

    /// The integrator produced an inadmissible state.
    #[error("integration failure at t = {t:.6e}: {detail}")]
    IntegrationFailure { t: f64, detail: String },

    /// Structured input (CSV) failed to parse.
    #[error("parse error at row {row}: {detail}")]
    Parse { row: usize, detail: String },

    /// A configuration or argument violated its contract.
    #[error("validation error for `{key}`: {detail}")]
    Validation { key: String, detail: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code for this error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "E_DOMAIN",
            Error::Relativistic { .. } => "E_RELATIVISTIC",
            Error::Degenerate(_) => "E_DEGENERATE",
            Error::Pole { .. } => "E_POLE",
            Error::PerturbationBreakdown { .. } => "E_PERTURBATION",
            Error::AsymptoticValidity { .. } => "E_ASYMPTOTIC",
            Error::Singularity(_) => "E_SINGULARITY",
            Error::NoConvergence { .. } => "E_NO_CONVERGENCE",
            Error::Stiffness { .. } => "E_STIFF",
            Error::IntegrationFailure { .. } => "E_INTEGRATION",
            Error::Parse { .. } => "E_PARSE",
            Error::Validation { .. } => "E_VALIDATION",
            Error::Io(_) => "E_IO",
            Error::Json(_) => "E_JSON",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Domain(_)
            | Error::Relativistic { .. }
            | Error::Degenerate(_)
            | Error::Singularity(_)
            | Error::AsymptoticValidity { .. }
            | Error::Parse { .. }
            | Error::Validation { .. } => ErrorClass::Validation,
            Error::Pole { .. }
            | Error::PerturbationBreakdown { .. }
            | Error::NoConvergence { .. }
            | Error::Stiffness { .. }
            | Error::IntegrationFailure { .. } => ErrorClass::Computation,
            Error::Io(_) | Error::Json(_) => ErrorClass::Io,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
