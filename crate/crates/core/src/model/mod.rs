//! Hamiltonian models and the ring-dipole magnetostatic potential.

mod levitron;
mod oscillator;
mod psi;

pub use levitron::{calibrate_m, LevitronModel, LevitronParams, DEFAULT_SIN_GUARD};
pub use oscillator::OscillatorModel;
pub use psi::{psi, PsiDerivatives};

use crate::error::Result;
use crate::state::{PhaseState, Vec6};

/// A Hamiltonian `H(q, p)` together with the two gradients the Poisson bracket needs.
pub trait HamiltonianModel: Send + Sync {
    fn energy(&self, state: &PhaseState) -> Result<f64>;

    /// `∂H/∂p`, the velocity field `q̇`.
    fn dh_dp(&self, state: &PhaseState) -> Result<Vec6>;

    /// `∂H/∂q`, so that `ṗ = −∂H/∂q`.
    fn dh_dq(&self, state: &PhaseState) -> Result<Vec6>;

    /// True when `∂H/∂q` depends on `q` only and `∂H/∂p` on `p` only.
    fn is_separable(&self) -> bool {
        false
    }

    /// Exact flow over `h`, when the model has a closed-form solution.
    fn exact_flow(&self, _state: &PhaseState, _h: f64) -> Option<PhaseState> {
        None
    }
}
