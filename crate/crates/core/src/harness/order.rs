use rayon::prelude::*;

use super::error::HarnessError;
use crate::error::Result;
use crate::integrators::{rk4_step, Stepper};
use crate::model::HamiltonianModel;
use crate::state::PhaseState;

/// Least-squares fit of `log(error)` against `log(h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    pub slope: f64,
    /// `(h, end-state error)` pairs used in the fit, largest `h` first.
    pub points: Vec<(f64, f64)>,
    /// Step sizes dropped because their error stopped decreasing.
    pub excluded: Vec<f64>,
}

fn march<F>(mut step: F, initial: &PhaseState, h: f64, steps: usize) -> Result<PhaseState>
where
    F: FnMut(&PhaseState, f64) -> Result<PhaseState>,
{
    let mut s = *initial;
    for n in 1..=steps {
        s = step(&s, h)?;
        s.t = initial.t + n as f64 * h;
    }
    Ok(s)
}

fn step_count(horizon: f64, h: f64) -> std::result::Result<usize, HarnessError> {
    let n = (horizon / h).round();
    if n < 1.0 || ((n * h - horizon).abs() > 1e-9 * horizon) {
        return Err(HarnessError::Config(format!(
            "step size {h} does not divide the horizon {horizon}"
        )));
    }
    Ok(n as usize)
}

/// End state of the true flow: analytic when the model has one, otherwise
/// RK4 at 1/16 of the smallest step, Richardson-corrected against 1/8.
fn oracle(
    model: &dyn HamiltonianModel,
    initial: &PhaseState,
    h_min: f64,
    horizon: f64,
) -> std::result::Result<PhaseState, HarnessError> {
    if let Some(exact) = model.exact_flow(initial, horizon) {
        return Ok(exact);
    }
    let n = 16 * step_count(horizon, h_min)?;
    let rk4 = |s: &PhaseState, h: f64| rk4_step(model, s, h);
    let (fine, coarse) = rayon::join(
        || march(rk4, initial, horizon / n as f64, n),
        || march(rk4, initial, horizon / (n / 2) as f64, n / 2),
    );
    let (fine, coarse) = (fine?, coarse?);
    Ok(fine.affine_increment(&[(1.0 / 15.0, fine), (-1.0 / 15.0, coarse)], fine.t))
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Measures the global order of `stepper` from end-state errors at `horizon`.
///
/// `hs` must hold at least four step sizes in geometric progression, each
/// dividing `horizon`. Once the error stops decreasing with `h` (roundoff
/// floor), that step size and all smaller ones are excluded; fewer than three
/// remaining points is a degenerate regression.
pub fn convergence_order(
    model: &dyn HamiltonianModel,
    stepper: &dyn Stepper,
    initial: &PhaseState,
    hs: &[f64],
    horizon: f64,
) -> std::result::Result<OrderEstimate, HarnessError> {
    if hs.len() < 4 {
        return Err(HarnessError::Config("need at least 4 step sizes".into()));
    }
    let mut hs = hs.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    let ratio = hs[0] / hs[1];
    if !(ratio > 1.0)
        || hs
            .windows(2)
            .any(|w| ((w[0] / w[1]) / ratio - 1.0).abs() > 1e-6)
    {
        return Err(HarnessError::Config(
            "step sizes must form a geometric progression".into(),
        ));
    }
    let counts = hs
        .iter()
        .map(|&h| step_count(horizon, h))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let exact = oracle(model, initial, *hs.last().unwrap(), horizon)?;
    let ends = hs
        .par_iter()
        .zip(counts.par_iter())
        .map(|(&h, &n)| {
            march(
                |s, h| Ok(stepper.step(model, s, h)?.new_state),
                initial,
                h,
                n,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for (&h, end) in hs.iter().zip(&ends) {
        let err = end.state_distance(&exact);
        let decreasing = points.last().is_none_or(|&(_, prev)| err < prev);
        if excluded.is_empty() && decreasing && err > 0.0 {
            points.push((h, err));
        } else {
            excluded.push(h);
        }
    }
    if points.len() < 3 {
        return Err(HarnessError::DegenerateRegression {
            reason: format!("only {} step sizes above the roundoff floor", points.len()),
            excluded,
        });
    }
    Ok(OrderEstimate {
        slope: fit_slope(&points),
        points,
        excluded,
    })
}
