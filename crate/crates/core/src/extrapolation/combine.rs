use super::table::MpeTable;
use crate::error::{Error, Result};
use crate::integrators::{
    frozen_verlet, iterate_residual, midpoint, IterationConfig, StepReport, VerletForm,
};
use crate::model::HamiltonianModel;
use crate::state::PhaseState;

fn power<K>(kernel: &K, state: &PhaseState, h: f64, k: u32) -> Result<PhaseState>
where
    K: Fn(&PhaseState, f64) -> Result<PhaseState>,
{
    let sub = h / k as f64;
    let mut x = *state;
    for _ in 0..k {
        x = kernel(&x, sub)?;
    }
    Ok(x)
}

/// `Σ cᵢ T₂^{kᵢ}(h/kᵢ)`.
///
/// Each product starts from `state`. The combination is accumulated in index
/// order as increments from `state`, which reproduces bit-exactly any
/// component every product leaves unchanged.
pub fn mpe_step<K>(kernel: K, state: &PhaseState, h: f64, table: &MpeTable) -> Result<PhaseState>
where
    K: Fn(&PhaseState, f64) -> Result<PhaseState>,
{
    let weights = table.coefficients_f64();
    let mut terms = Vec::with_capacity(weights.len());
    for (w, &k) in weights.into_iter().zip(&table.k) {
        terms.push((w, power(&kernel, state, h, k)?));
    }
    Ok(state.affine_increment(&terms, state.t + h))
}

/// Two-term Richardson extrapolation `(k² T₂^k(h/k) − T₂(h)) / (k² − 1)`.
pub fn richardson3_step<K>(kernel: K, state: &PhaseState, h: f64, k: u32) -> Result<PhaseState>
where
    K: Fn(&PhaseState, f64) -> Result<PhaseState>,
{
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "Richardson needs k ≥ 2, got {k}"
        )));
    }
    let k2 = (k as f64) * (k as f64);
    let coarse = kernel(state, h)?;
    let fine = power(&kernel, state, h, k)?;
    let terms = [(-1.0 / (k2 - 1.0), coarse), (k2 / (k2 - 1.0), fine)];
    Ok(state.affine_increment(&terms, state.t + h))
}

/// Fixed-point iteration wrapped around the whole multi-product combination.
///
/// Every kernel application (substep `j` of product `i`) keeps its end state
/// from the previous sweep; the next sweep freezes that substep's cross
/// arguments at the midpoint of its current start and that stored end. The
/// first sweep takes its guesses from `cfg.init`. The stopping rule compares
/// successive combined states, as in [`crate::integrators::verlet_step`].
pub fn iterative_mpe_step(
    model: &dyn HamiltonianModel,
    state: &PhaseState,
    h: f64,
    table: &MpeTable,
    cfg: &IterationConfig,
    form: VerletForm,
) -> Result<StepReport> {
    cfg.validate()?;
    let weights = table.coefficients_f64();
    let mut guesses: Vec<Vec<Option<PhaseState>>> =
        table.k.iter().map(|&k| vec![None; k as usize]).collect();
    let mut prev = cfg.init.initial_iterate(model, state, h)?;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut terms = Vec::with_capacity(weights.len());
        for ((w, &k), ends) in weights.iter().zip(&table.k).zip(guesses.iter_mut()) {
            let sub = h / k as f64;
            let mut x = *state;
            for end in ends.iter_mut() {
                let guess = match end {
                    Some(g) => *g,
                    None => cfg.init.initial_iterate(model, &x, sub)?,
                };
                let next = frozen_verlet(model, &x, &midpoint(&x, &guess), sub, form)?;
                *end = Some(next);
                x = next;
            }
            terms.push((*w, x));
        }
        let next = state.affine_increment(&terms, state.t + h);
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
