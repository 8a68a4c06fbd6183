use thiserror::Error;

/// Failures raised by models, steppers and extrapolation tables.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "coordinate singularity at t = {t}: |sin q4| = {sin_q4:e} is below the guard {guard:e}"
    )]
    Singularity { t: f64, sin_q4: f64, guard: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),

    #[error("the separable Verlet step requires a separable model")]
    NonSeparable,

    #[error("singular Jacobian at Newton iteration {iteration}")]
    SingularJacobian { iteration: usize },

    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("extrapolation table of size {0} is outside the supported range 1..=8")]
    Overflow(usize),

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
