//! One-step maps over any [`HamiltonianModel`].
//!
//! Every integrator is exposed twice: as a free function taking its
//! configuration explicitly, and as a [`Stepper`] trait object that the
//! [`StepperRegistry`] builds by name.

mod explicit;
mod newton;
mod registry;
mod splitting;

pub use explicit::{euler_step, rk4_step, vector_field};
pub use newton::{newton_implicit_step, newton_solve, NewtonOptions, NewtonSolution};
pub use registry::{StepperFactory, StepperOptions, StepperRegistry};
pub use splitting::{
    frozen_verlet, verlet_separable_step, verlet_step, ShiftKind, SplittingOperator, VerletForm,
};

use crate::error::{Error, Result};
use crate::model::HamiltonianModel;
use crate::state::PhaseState;

/// How the fixed-point iteration picks its first iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitStrategy {
    /// Start from the state at the beginning of the step.
    #[default]
    PreviousStep,
    /// Start from one explicit Euler step.
    ExplicitEuler,
    /// Start from one classic Runge-Kutta step.
    Rk4,
}

impl InitStrategy {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "previous-step" | "previous" | "none" => Some(Self::PreviousStep),
            "explicit-euler" | "euler" => Some(Self::ExplicitEuler),
            "rk4" => Some(Self::Rk4),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PreviousStep => "previous-step",
            Self::ExplicitEuler => "explicit-euler",
            Self::Rk4 => "rk4",
        }
    }

    /// First iterate for a step of size `h` from `state`.
    pub fn initial_iterate(
        &self,
        model: &dyn HamiltonianModel,
        state: &PhaseState,
        h: f64,
    ) -> Result<PhaseState> {
        match self {
            Self::PreviousStep => Ok(*state),
            Self::ExplicitEuler => euler_step(model, state, h),
            Self::Rk4 => rk4_step(model, state, h),
        }
    }
}

/// Controls for the fixed-point (Picard) iteration of the implicit splitting steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationConfig {
    /// Maximum number of sweeps `I`.
    pub max_iters: usize,
    /// Stopping tolerance on `max(‖p_i − p_{i−1}‖, ‖q_i − q_{i−1}‖)`.
    pub tol: f64,
    pub init: InitStrategy,
    /// Number of terms kept in the exponential series of each shift. With
    /// frozen coefficients the series is exact after the linear term, so any
    /// value ≥ 1 yields the same map.
    pub series_terms: usize,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            max_iters: 4,
            tol: 1e-4,
            init: InitStrategy::PreviousStep,
            series_terms: 1,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter(
                "max_iters must be at least 1".into(),
            ));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.series_terms < 1 {
            return Err(Error::InvalidParameter(
                "series_terms must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Result of one step of any integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub new_state: PhaseState,
    /// Sweeps (fixed point) or Newton updates performed; 1 for explicit maps.
    pub iterations_used: usize,
    pub final_residual: f64,
}

impl StepReport {
    pub fn explicit(new_state: PhaseState) -> Self {
        Self {
            new_state,
            iterations_used: 1,
            final_residual: 0.0,
        }
    }
}

/// A named one-step integrator.
pub trait Stepper: Send + Sync {
    fn name(&self) -> &str;

    fn step(&self, model: &dyn HamiltonianModel, state: &PhaseState, h: f64) -> Result<StepReport>;

    /// Nominal order of accuracy.
    fn order(&self) -> usize;
}

/// Fixed-point residual `max(‖p_a − p_b‖, ‖q_a − q_b‖)`.
pub(crate) fn iterate_residual(a: &PhaseState, b: &PhaseState) -> f64 {
    (a.p - b.p).norm().max((a.q - b.q).norm())
}

pub(crate) fn midpoint(a: &PhaseState, b: &PhaseState) -> PhaseState {
    PhaseState {
        q: (a.q + b.q) * 0.5,
        p: (a.p + b.p) * 0.5,
        t: 0.5 * (a.t + b.t),
    }
}
