use std::path::PathBuf;

use super::compare::DEFAULT_STABILITY_BOUND;
use super::error::HarnessError;
use crate::error::Result;
use crate::integrators::StepperOptions;
use crate::model::{calibrate_m, HamiltonianModel, LevitronModel, LevitronParams, OscillatorModel};
use crate::state::PhaseState;

/// Height of the levitation equilibrium the experiments start from.
pub const EQUILIBRIUM_HEIGHT: f64 = 1.72;
/// Initial tilt of the spin axis. Positive `M` needs `cos q4 > 0` at the equilibrium.
pub const DEFAULT_TILT: f64 = 0.01;
pub const DEFAULT_A: f64 = 0.05;
pub const DEFAULT_C: f64 = 0.1;
/// Center of the stable window `spin_scan` finds for the default constants
/// (0.6 ≤ p6 ≤ 1.4 over 20 time units with rk4 at h = 1e-3).
pub const DEFAULT_SPIN: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// `m = None` calibrates `M` so the initial height and tilt are a vertical equilibrium.
    Levitron {
        a: f64,
        c: f64,
        m: Option<f64>,
    },
    Oscillator {
        mass: f64,
        stiffness: f64,
    },
}

impl ModelSpec {
    pub fn levitron_default() -> Self {
        Self::Levitron {
            a: DEFAULT_A,
            c: DEFAULT_C,
            m: None,
        }
    }

    pub fn build(&self, initial: &PhaseState) -> Result<Box<dyn HamiltonianModel>> {
        Ok(match *self {
            Self::Levitron { a, c, m } => {
                let m = match m {
                    Some(m) => m,
                    None => calibrate_m(initial.q[2], initial.q[3])?,
                };
                Box::new(LevitronModel::new(LevitronParams::new(a, c, m)?))
            }
            Self::Oscillator { mass, stiffness } => {
                Box::new(OscillatorModel::new(mass, stiffness)?)
            }
        })
    }

    pub fn is_levitron(&self) -> bool {
        matches!(self, Self::Levitron { .. })
    }
}

/// Sets the spin `p6` and matches `p5 = p6 cos q4`, so the top starts without
/// precession.
pub fn with_spin(state: &PhaseState, p6: f64) -> PhaseState {
    let mut s = *state;
    s.p[5] = p6;
    s.p[4] = p6 * s.q[3].cos();
    s
}

/// Top at rest on the axis at height `z`, tilted by `tilt`, spinning with `p6`.
pub fn levitron_initial_state(z: f64, tilt: f64, p6: f64) -> PhaseState {
    with_spin(
        &PhaseState::new([0.0, 0.0, z, tilt, 0.0, 0.0], [0.0; 6], 0.0),
        p6,
    )
}

/// Everything needed to reproduce one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    /// Registry name of the integrator.
    pub integrator: String,
    pub options: StepperOptions,
    pub h: f64,
    pub steps: usize,
    /// Record every `stride`-th step (the initial and final states are always kept).
    pub stride: usize,
    pub initial_state: PhaseState,
    pub output: Option<PathBuf>,
    pub reference: Option<PathBuf>,
    /// Largest `|q3(t) − q3(0)|` a stable run may show.
    pub stability_bound: f64,
    /// A run aborts once the center of mass is this far from where it started.
    pub escape_radius: f64,
}

impl RunConfig {
    /// Levitron at the equilibrium height with the default constants.
    pub fn levitron(integrator: &str, h: f64, steps: usize, p6: f64) -> Self {
        Self {
            model: ModelSpec::levitron_default(),
            integrator: integrator.to_string(),
            options: StepperOptions::default(),
            h,
            steps,
            stride: 1,
            initial_state: levitron_initial_state(EQUILIBRIUM_HEIGHT, DEFAULT_TILT, p6),
            output: None,
            reference: None,
            stability_bound: DEFAULT_STABILITY_BOUND,
            escape_radius: 5.0,
        }
    }

    pub fn oscillator(integrator: &str, h: f64, steps: usize, initial_state: PhaseState) -> Self {
        Self {
            model: ModelSpec::Oscillator {
                mass: 1.0,
                stiffness: 1.0,
            },
            initial_state,
            ..Self::levitron(integrator, h, steps, 0.0)
        }
    }

    pub fn horizon(&self) -> f64 {
        self.h * self.steps as f64
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.steps < 1 {
            return Err(HarnessError::Config("steps must be at least 1".into()));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(HarnessError::Config(format!(
                "step size must be positive, got {}",
                self.h
            )));
        }
        if self.stride < 1 {
            return Err(HarnessError::Config("stride must be at least 1".into()));
        }
        if !self.initial_state.is_finite() {
            return Err(HarnessError::Config("initial state is not finite".into()));
        }
        if !(self.stability_bound > 0.0) || !(self.escape_radius > 0.0) {
            return Err(HarnessError::Config(
                "stability bound and escape radius must be positive".into(),
            ));
        }
        let model = self.model.build(&self.initial_state)?;
        model.energy(&self.initial_state)?;
        Ok(())
    }
}
