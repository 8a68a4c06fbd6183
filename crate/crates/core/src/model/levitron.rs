use nalgebra::Vector3;

use super::psi::psi;
use super::HamiltonianModel;
use crate::error::{Error, Result};
use crate::state::{PhaseState, Vec6};

pub const DEFAULT_SIN_GUARD: f64 = 1e-8;

/// Nondimensional constants of the reduced Levitron Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevitronParams {
    /// Transverse moment of inertia.
    pub a: f64,
    /// Axial moment of inertia.
    pub c: f64,
    /// Ratio of magnetic to gravitational energy.
    pub m: f64,
    /// Smallest admissible `|sin q4|`.
    pub sin_guard: f64,
}

impl LevitronParams {
    pub fn new(a: f64, c: f64, m: f64) -> Result<Self> {
        Self::with_guard(a, c, m, DEFAULT_SIN_GUARD)
    }

    pub fn with_guard(a: f64, c: f64, m: f64, sin_guard: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "a must be positive, got {a}"
            )));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "c must be positive, got {c}"
            )));
        }
        if !(m >= 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "M must be non-negative, got {m}"
            )));
        }
        if !(sin_guard > 0.0 && sin_guard < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sin guard must lie in (0, 1), got {sin_guard}"
            )));
        }
        Ok(Self { a, c, m, sin_guard })
    }
}

/// Reduced Hamiltonian of a magnetic top above a ring-dipole base:
///
/// ```text
/// H = ½(p1² + p2² + p3² + p4²/a + (p5 − p6 cos q4)²/(a sin²q4) + p6²/c)
///     − M [sin q4 (cos q5 ∂Ψ/∂q1 + sin q5 ∂Ψ/∂q2) + cos q4 ∂Ψ/∂q3] + q3
/// ```
///
/// `q6` is cyclic, so `p6` (the spin) is a constant of motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevitronModel {
    pub params: LevitronParams,
}

struct Angles {
    sin4: f64,
    cos4: f64,
    sin5: f64,
    cos5: f64,
}

impl LevitronModel {
    pub fn new(params: LevitronParams) -> Self {
        Self { params }
    }

    fn angles(&self, state: &PhaseState) -> Result<Angles> {
        let (sin4, cos4) = state.q[3].sin_cos();
        if !(sin4.abs() >= self.params.sin_guard) {
            return Err(Error::Singularity {
                t: state.t,
                sin_q4: sin4.abs(),
                guard: self.params.sin_guard,
            });
        }
        let (sin5, cos5) = state.q[4].sin_cos();
        Ok(Angles {
            sin4,
            cos4,
            sin5,
            cos5,
        })
    }
}

fn position(state: &PhaseState) -> Vector3<f64> {
    Vector3::new(state.q[0], state.q[1], state.q[2])
}

impl HamiltonianModel for LevitronModel {
    fn energy(&self, state: &PhaseState) -> Result<f64> {
        let LevitronParams { a, c, m, .. } = self.params;
        let ang = self.angles(state)?;
        let p = &state.p;
        let d = p[4] - p[5] * ang.cos4;
        let kinetic = 0.5
            * (p[0] * p[0]
                + p[1] * p[1]
                + p[2] * p[2]
                + p[3] * p[3] / a
                + d * d / (a * ang.sin4 * ang.sin4)
                + p[5] * p[5] / c);
        let grad = psi(&position(state)).grad;
        let axis_dot_field =
            ang.sin4 * (ang.cos5 * grad[0] + ang.sin5 * grad[1]) + ang.cos4 * grad[2];
        Ok(kinetic - m * axis_dot_field + state.q[2])
    }

    fn dh_dp(&self, state: &PhaseState) -> Result<Vec6> {
        let LevitronParams { a, c, .. } = self.params;
        let ang = self.angles(state)?;
        let p = &state.p;
        let a_sin2 = a * ang.sin4 * ang.sin4;
        let d = p[4] - p[5] * ang.cos4;
        Ok(Vec6::new(
            p[0],
            p[1],
            p[2],
            p[3] / a,
            d / a_sin2,
            p[5] / c - ang.cos4 * d / a_sin2,
        ))
    }

    fn dh_dq(&self, state: &PhaseState) -> Result<Vec6> {
        let LevitronParams { a, m, .. } = self.params;
        let ang = self.angles(state)?;
        let p = &state.p;
        let psi = psi(&position(state));
        let (g, hs) = (psi.grad, psi.hess);

        // unit axis n = (sin q4 cos q5, sin q4 sin q5, cos q4); magnetic energy is −M n·∇Ψ
        let n = Vector3::new(ang.sin4 * ang.cos5, ang.sin4 * ang.sin5, ang.cos4);
        let force_pos = hs * n;

        let d = p[4] - p[5] * ang.cos4;
        let sin3 = ang.sin4 * ang.sin4 * ang.sin4;
        let kin_theta = d * p[5] / (a * ang.sin4) - d * d * ang.cos4 / (a * sin3);
        let dn_dtheta = ang.cos4 * (ang.cos5 * g[0] + ang.sin5 * g[1]) - ang.sin4 * g[2];
        let dn_dpsi = ang.sin4 * (ang.cos5 * g[1] - ang.sin5 * g[0]);

        Ok(Vec6::new(
            -m * force_pos[0],
            -m * force_pos[1],
            -m * force_pos[2] + 1.0,
            kin_theta - m * dn_dtheta,
            -m * dn_dpsi,
            0.0,
        ))
    }
}

/// Solves `r(M) = 0` for a residual known to be affine in `M`.
fn affine_root(residual: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let r0 = residual(0.0)?;
    let slope = residual(1.0)? - r0;
    if slope == 0.0 || !slope.is_finite() {
        return Err(Error::NoEquilibrium(
            "the magnetic vertical force vanishes at this height".into(),
        ));
    }
    Ok(-r0 / slope)
}

/// Magnetic strength `M` for which `(0, 0, z_star)` with tilt `q4 = tilt` is an
/// equilibrium of the vertical force. The result does not depend on `a`, `c`.
pub fn calibrate_m(z_star: f64, tilt: f64) -> Result<f64> {
    if !(z_star > 0.0 && z_star.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "equilibrium height must be positive, got {z_star}"
        )));
    }
    let state = PhaseState::new([0.0, 0.0, z_star, tilt, 0.0, 0.0], [0.0; 6], 0.0);
    let m = affine_root(|m| {
        let model = LevitronModel::new(LevitronParams {
            a: 1.0,
            c: 1.0,
            m,
            sin_guard: DEFAULT_SIN_GUARD,
        });
        Ok(model.dh_dq(&state)?[2])
    })?;
    if m < 0.0 {
        return Err(Error::NoEquilibrium(format!(
            "equilibrium at z = {z_star} with tilt {tilt} needs M = {m} < 0; flip the axis"
        )));
    }
    Ok(m)
}
