use crate::error::Result;
use crate::model::HamiltonianModel;
use crate::state::{PhaseState, Vec6};

/// `(q̇, ṗ) = (∂H/∂p, −∂H/∂q)`.
pub fn vector_field(model: &dyn HamiltonianModel, state: &PhaseState) -> Result<(Vec6, Vec6)> {
    Ok((model.dh_dp(state)?, -model.dh_dq(state)?))
}

fn shifted(state: &PhaseState, k: &(Vec6, Vec6), h: f64) -> PhaseState {
    PhaseState {
        q: state.q + k.0 * h,
        p: state.p + k.1 * h,
        t: state.t + h,
    }
}

pub fn euler_step(model: &dyn HamiltonianModel, state: &PhaseState, h: f64) -> Result<PhaseState> {
    let k = vector_field(model, state)?;
    Ok(shifted(state, &k, h))
}

/// Classic four-stage Runge-Kutta step.
pub fn rk4_step(model: &dyn HamiltonianModel, state: &PhaseState, h: f64) -> Result<PhaseState> {
    let half = 0.5 * h;
    let k1 = vector_field(model, state)?;
    let k2 = vector_field(model, &shifted(state, &k1, half))?;
    let k3 = vector_field(model, &shifted(state, &k2, half))?;
    let k4 = vector_field(model, &shifted(state, &k3, h))?;
    let sixth = h / 6.0;
    Ok(PhaseState {
        q: state.q + (k1.0 + (k2.0 + k3.0) * 2.0 + k4.0) * sixth,
        p: state.p + (k1.1 + (k2.1 + k3.1) * 2.0 + k4.1) * sixth,
        t: state.t + h,
    })
}
