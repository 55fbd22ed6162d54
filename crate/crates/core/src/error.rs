use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the simulator.
///
/// Variants fall in two families: input validation (bad parameters, misuse of
/// an operation, infeasible geometry) and numerical failure (non-convergence,
/// size guards, pulses leaving the grid). [`Error::is_validation`] tells them
/// apart for callers that map errors to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("no dark state: total control coupling omega_R^2 + omega_L^2 is zero")]
    NoDarkState,

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("branch tracking ambiguous at k = {k:.6e}: best eigenvector overlap {overlap:.3} < 0.5")]
    BranchTracking { k: f64, overlap: f64 },

    #[error("time step dt = {dt:.3e} exceeds stability limit; use dt <= {dt_max:.3e}")]
    StepTooLarge { dt: f64, dt_max: f64 },

    #[error("pulse touches the grid boundary at t = {time:.4}: edge weight {edge_weight:.3e}")]
    PulseAtBoundary { time: f64, edge_weight: f64 },

    #[error("Hilbert space dimension {dim} exceeds cap {cap}")]
    HilbertCap { dim: usize, cap: usize },

    #[error("{solver} did not converge after {iterations} iterations (last residual {last:.3e})")]
    NonConvergence {
        solver: &'static str,
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

impl Error {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation { .. }
                | Error::NoDarkState
                | Error::Misuse(_)
                | Error::StepTooLarge { .. }
                | Error::Infeasible(_)
                | Error::Degenerate(_)
                | Error::InsufficientData(_)
        )
    }
}
