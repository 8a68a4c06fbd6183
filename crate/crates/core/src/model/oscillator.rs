use super::HamiltonianModel;
use crate::error::{Error, Result};
use crate::state::{PhaseState, Vec6};

/// Separable isotropic oscillator `H = |p|²/(2m) + ½ k |q|²` on all six axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorModel {
    pub mass: f64,
    pub stiffness: f64,
}

impl OscillatorModel {
    pub fn new(mass: f64, stiffness: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive, got {mass}"
            )));
        }
        if !(stiffness >= 0.0 && stiffness.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "stiffness must be non-negative, got {stiffness}"
            )));
        }
        Ok(Self { mass, stiffness })
    }

    pub fn omega(&self) -> f64 {
        (self.stiffness / self.mass).sqrt()
    }

    /// Closed-form solution at time `t` measured from `state.t`.
    pub fn solution(&self, state: &PhaseState, t: f64) -> PhaseState {
        let w = self.omega();
        let (q, p) = if w == 0.0 {
            (state.q + state.p * (t / self.mass), state.p)
        } else {
            let (s, c) = (w * t).sin_cos();
            let mw = self.mass * w;
            (
                state.q * c + state.p * (s / mw),
                state.p * c - state.q * (mw * s),
            )
        };
        PhaseState {
            q,
            p,
            t: state.t + t,
        }
    }
}

impl HamiltonianModel for OscillatorModel {
    fn energy(&self, state: &PhaseState) -> Result<f64> {
        Ok(state.p.norm_squared() / (2.0 * self.mass)
            + 0.5 * self.stiffness * state.q.norm_squared())
    }

    fn dh_dp(&self, state: &PhaseState) -> Result<Vec6> {
        Ok(state.p / self.mass)
    }

    fn dh_dq(&self, state: &PhaseState) -> Result<Vec6> {
        Ok(state.q * self.stiffness)
    }

    fn is_separable(&self) -> bool {
        true
    }

    fn exact_flow(&self, state: &PhaseState, h: f64) -> Option<PhaseState> {
        Some(self.solution(state, h))
    }
}
