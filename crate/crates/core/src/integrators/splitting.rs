//! Verlet splittings `e^{(h/2)B} e^{hA} e^{(h/2)B}` (velocity form) and
//! `e^{(h/2)A} e^{hB} e^{(h/2)A}` (position form).
//!
//! For a separable `H` the flows of `A = ∂H/∂p·∂/∂q` and `B = −∂H/∂q·∂/∂p`
//! are exact shifts. For a non-separable `H` each shift is taken with its
//! cross argument frozen: the `B`-shift uses `∂H/∂q(p̃, q)` and the `A`-shift
//! `∂H/∂p(p, q̃)`, where `(p̃, q̃)` is a frozen point. The frozen point is then
//! updated by fixed-point iteration until the step is self-consistent.

use super::{iterate_residual, midpoint, IterationConfig, StepReport};
use crate::error::{Error, Result};
use crate::model::HamiltonianModel;
use crate::state::PhaseState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftKind {
    /// `q ← q + h ∂H/∂p`.
    A,
    /// `p ← p − h ∂H/∂q`.
    B,
}

/// One exponential factor `e^{hA}` or `e^{hB}` with coefficients evaluated at a
/// supplied point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplittingOperator {
    pub kind: ShiftKind,
}

impl SplittingOperator {
    pub const A: Self = Self { kind: ShiftKind::A };
    pub const B: Self = Self { kind: ShiftKind::B };

    pub fn apply(
        &self,
        model: &dyn HamiltonianModel,
        state: &PhaseState,
        h: f64,
        eval_at: &PhaseState,
    ) -> Result<PhaseState> {
        let mut out = *state;
        match self.kind {
            ShiftKind::A => out.q += model.dh_dp(eval_at)? * h,
            ShiftKind::B => out.p -= model.dh_dq(eval_at)? * h,
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VerletForm {
    /// Velocity Verlet: kick, drift, kick.
    #[default]
    Velocity,
    /// Position Verlet: drift, kick, drift.
    Position,
}

/// Kick, drift, kick for a separable model, exact composition of the three shifts.
pub fn verlet_separable_step(
    model: &dyn HamiltonianModel,
    state: &PhaseState,
    h: f64,
) -> Result<PhaseState> {
    if !model.is_separable() {
        return Err(Error::NonSeparable);
    }
    let half = 0.5 * h;
    let x1 = SplittingOperator::B.apply(model, state, half, state)?;
    let x2 = SplittingOperator::A.apply(model, &x1, h, &x1)?;
    let mut x3 = SplittingOperator::B.apply(model, &x2, half, &x2)?;
    x3.t = state.t + h;
    Ok(x3)
}

fn with_p(state: &PhaseState, from: &PhaseState) -> PhaseState {
    PhaseState {
        p: from.p,
        ..*state
    }
}

fn with_q(state: &PhaseState, from: &PhaseState) -> PhaseState {
    PhaseState {
        q: from.q,
        ..*state
    }
}

/// One sweep of the splitting with cross arguments frozen at `frozen`.
///
/// `B`-shifts evaluate `∂H/∂q` at `(frozen.p, current q)`, `A`-shifts evaluate
/// `∂H/∂p` at `(current p, frozen.q)`. For a separable model the frozen point
/// is never read and the result is the exact Verlet step.
pub fn frozen_verlet(
    model: &dyn HamiltonianModel,
    state: &PhaseState,
    frozen: &PhaseState,
    h: f64,
    form: VerletForm,
) -> Result<PhaseState> {
    let half = 0.5 * h;
    let (a, b) = (SplittingOperator::A, SplittingOperator::B);
    let mut out = match form {
        VerletForm::Velocity => {
            let x1 = b.apply(model, state, half, &with_p(state, frozen))?;
            let x2 = a.apply(model, &x1, h, &with_q(&x1, frozen))?;
            b.apply(model, &x2, half, &with_p(&x2, frozen))?
        }
        VerletForm::Position => {
            let x1 = a.apply(model, state, half, &with_q(state, frozen))?;
            let x2 = b.apply(model, &x1, h, &with_p(&x1, frozen))?;
            a.apply(model, &x2, half, &with_q(&x2, frozen))?
        }
    };
    out.t = state.t + h;
    Ok(out)
}

/// Iterative Verlet step.
///
/// Sweep `i` freezes the cross arguments at the midpoint of the step start and
/// the previous iterate, so the converged map is symmetric and second order.
/// Stops when the iterate change drops to `cfg.tol` or after `cfg.max_iters`
/// sweeps; running out of sweeps is reported, not an error.
pub fn verlet_step(
    model: &dyn HamiltonianModel,
    state: &PhaseState,
    h: f64,
    cfg: &IterationConfig,
    form: VerletForm,
) -> Result<StepReport> {
    cfg.validate()?;
    let mut prev = cfg.init.initial_iterate(model, state, h)?;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let frozen = midpoint(state, &prev);
        let next = frozen_verlet(model, state, &frozen, h, form)?;
        let residual = iterate_residual(&next, &prev);
        if residual <= cfg.tol || iterations >= cfg.max_iters {
            return Ok(StepReport {
                new_state: next,
                iterations_used: iterations,
                final_residual: residual,
            });
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::InitStrategy;
    use crate::model::{LevitronModel, LevitronParams, OscillatorModel};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn osc() -> OscillatorModel {
        OscillatorModel::new(1.0, 1.0).unwrap()
    }

    fn levitron() -> LevitronModel {
        LevitronModel::new(LevitronParams::new(0.05, 0.1, 8.2).unwrap())
    }

    fn top_state() -> PhaseState {
        PhaseState::new(
            [0.01, -0.005, 1.72, 0.05, 0.2, 0.0],
            [0.01, 0.0, -0.02, 0.001, 0.999, 1.0],
            0.0,
        )
    }

    #[test]
    fn separable_step_hand_values() {
        let s = PhaseState::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0], [0.0; 6], 0.0);
        let r = verlet_separable_step(&osc(), &s, 0.1).unwrap();
        assert_relative_eq!(r.q[0], 0.995, epsilon = 1e-15);
        assert_relative_eq!(r.p[0], -0.09975, epsilon = 1e-15);
    }

    #[test]
    fn separable_step_identity_and_reversibility() {
        let s = PhaseState::new(
            [1.0, -0.3, 0.2, 0.0, 0.7, 0.0],
            [0.1, 0.4, 0.0, -0.5, 0.0, 0.2],
            0.0,
        );
        assert_eq!(verlet_separable_step(&osc(), &s, 0.0).unwrap(), s);
        let f = verlet_separable_step(&osc(), &s, 0.1).unwrap();
        let b = verlet_separable_step(&osc(), &f, -0.1).unwrap();
        assert!((b.q - s.q).amax() <= 1e-13);
        assert!((b.p - s.p).amax() <= 1e-13);
    }

    #[test]
    fn separable_step_rejects_levitron() {
        assert_eq!(
            verlet_separable_step(&levitron(), &top_state(), 0.1),
            Err(Error::NonSeparable)
        );
    }

    #[test]
    fn iterated_matches_separable_on_oscillator() {
        let s = PhaseState::new(
            [1.0, -0.3, 0.2, 0.0, 0.7, 0.0],
            [0.1, 0.4, 0.0, -0.5, 0.0, 0.2],
            0.0,
        );
        let exact = verlet_separable_step(&osc(), &s, 0.1).unwrap();
        for init in [
            InitStrategy::PreviousStep,
            InitStrategy::ExplicitEuler,
            InitStrategy::Rk4,
        ] {
            let cfg = IterationConfig {
                max_iters: 2,
                init,
                ..Default::default()
            };
            let r = verlet_step(&osc(), &s, 0.1, &cfg, VerletForm::Velocity).unwrap();
            assert!((r.new_state.q - exact.q).amax() <= 1e-12);
            assert!((r.new_state.p - exact.p).amax() <= 1e-12);
        }
    }

    #[test]
    fn rk4_init_beats_previous_step_init() {
        let s = top_state();
        let one = |init| IterationConfig {
            max_iters: 1,
            init,
            ..Default::default()
        };
        let prev = verlet_step(
            &levitron(),
            &s,
            1e-2,
            &one(InitStrategy::PreviousStep),
            VerletForm::Velocity,
        )
        .unwrap();
        let rk = verlet_step(
            &levitron(),
            &s,
            1e-2,
            &one(InitStrategy::Rk4),
            VerletForm::Velocity,
        )
        .unwrap();
        assert!(
            rk.final_residual < prev.final_residual,
            "{} vs {}",
            rk.final_residual,
            prev.final_residual
        );
    }

    #[test]
    fn converged_step_is_reversible() {
        let cfg = IterationConfig {
            max_iters: 50,
            tol: 1e-10,
            ..Default::default()
        };
        for form in [VerletForm::Velocity, VerletForm::Position] {
            let s = top_state();
            let f = verlet_step(&levitron(), &s, 1e-2, &cfg, form).unwrap();
            assert!(f.final_residual <= cfg.tol);
            let b = verlet_step(&levitron(), &f.new_state, -1e-2, &cfg, form).unwrap();
            assert!(iterate_residual(&b.new_state, &s) <= 10.0 * cfg.tol);
        }
    }

    #[test]
    fn spin_momentum_is_exact() {
        let s = top_state();
        let cfg = IterationConfig::default();
        for form in [VerletForm::Velocity, VerletForm::Position] {
            let r = verlet_step(&levitron(), &s, 1e-3, &cfg, form).unwrap();
            assert_eq!(r.new_state.p[5], s.p[5]);
        }
    }

    #[test]
    fn rejects_invalid_config() {
        let cfg = IterationConfig {
            max_iters: 0,
            ..Default::default()
        };
        assert!(verlet_step(&osc(), &top_state(), 0.1, &cfg, VerletForm::Velocity).is_err());
        let cfg = IterationConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(verlet_step(&osc(), &top_state(), 0.1, &cfg, VerletForm::Velocity).is_err());
    }

    fn arb_state() -> impl Strategy<Value = PhaseState> {
        (
            prop::array::uniform6(-1.0f64..1.0),
            prop::array::uniform6(-1.0f64..1.0),
            0.2f64..2.9,
        )
            .prop_map(|(mut q, p, tilt)| {
                q[2] += 1.7;
                q[3] = tilt;
                PhaseState::new(q, p, 0.0)
            })
    }

    proptest! {
        #[test]
        fn shifts_touch_only_their_block(s in arb_state(), h in -0.1f64..0.1) {
            let model = levitron();
            let a = SplittingOperator::A.apply(&model, &s, h, &s).unwrap();
            prop_assert_eq!(a.p, s.p);
            let b = SplittingOperator::B.apply(&model, &s, h, &s).unwrap();
            prop_assert_eq!(b.q, s.q);
        }

        #[test]
        fn stopping_contract(s in arb_state(), h in 1e-4f64..0.05, iters in 1usize..6) {
            let cfg = IterationConfig { max_iters: iters, ..Default::default() };
            let r = verlet_step(&levitron(), &s, h, &cfg, VerletForm::Velocity).unwrap();
            prop_assert!(r.final_residual <= cfg.tol || r.iterations_used == cfg.max_iters);
            prop_assert!(r.iterations_used <= cfg.max_iters);
        }
    }
}
