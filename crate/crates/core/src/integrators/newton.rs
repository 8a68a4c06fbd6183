use nalgebra::{DMatrix, DVector, SVector};

use super::StepReport;
use crate::error::{Error, Result};
use crate::model::HamiltonianModel;
use crate::state::PhaseState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Stop once `‖F(x)‖ ≤ tol`.
    pub tol: f64,
    pub max_iters: usize,
    /// Forward-difference perturbation is `fd_step · max(1, |x_j|)`.
    pub fd_step: f64,
    /// Maximum number of step halvings in the line search.
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            max_iters: 50,
            fd_step: 1e-7,
            max_halvings: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSolution {
    pub x: DVector<f64>,
    /// Number of Newton updates applied.
    pub iterations: usize,
    pub residual_norm: f64,
    /// `‖F‖` before each update and at the returned point.
    pub history: Vec<f64>,
}

fn fd_jacobian<F>(
    residual: &mut F,
    x: &DVector<f64>,
    fx: &DVector<f64>,
    rel: f64,
) -> Result<DMatrix<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let n = x.len();
    let mut jac = DMatrix::zeros(fx.len(), n);
    let mut xp = x.clone();
    for j in 0..n {
        let xj = x[j];
        xp[j] = xj + rel * xj.abs().max(1.0);
        // use the representable perturbation
        let delta = xp[j] - xj;
        let fp = residual(&xp)?;
        jac.set_column(j, &((fp - fx) / delta));
        xp[j] = xj;
    }
    Ok(jac)
}

/// Damped Newton iteration `F'(xᵢ) Δxᵢ = −F(xᵢ)` with a forward-difference
/// Jacobian and a halving line search on `‖F‖`.
pub fn newton_solve<F>(
    mut residual: F,
    x0: DVector<f64>,
    opts: &NewtonOptions,
) -> Result<NewtonSolution>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let mut x = x0;
    let mut fx = residual(&x)?;
    let mut norm = fx.norm();
    let mut history = vec![norm];
    let mut iterations = 0;
    while !(norm <= opts.tol) {
        if iterations >= opts.max_iters || !norm.is_finite() {
            return Err(Error::MaxIterations {
                iterations,
                residual: norm,
            });
        }
        let jac = fd_jacobian(&mut residual, &x, &fx, opts.fd_step)?;
        let dx = jac
            .lu()
            .solve(&(-&fx))
            .filter(|d| d.iter().all(|v| v.is_finite()))
            .ok_or(Error::SingularJacobian {
                iteration: iterations,
            })?;

        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = &x + &dx * lambda;
            if let Ok(ft) = residual(&trial) {
                let tn = ft.norm();
                if tn < norm {
                    accepted = Some((trial, ft, tn));
                    break;
                }
            }
            lambda *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((xn, fxn, nn)) => {
                x = xn;
                fx = fxn;
                norm = nn;
            }
            None => {
                return Err(Error::MaxIterations {
                    iterations,
                    residual: norm,
                })
            }
        }
        history.push(norm);
    }
    Ok(NewtonSolution {
        x,
        iterations,
        residual_norm: norm,
        history,
    })
}

/// Implicit midpoint step solved by Newton's method.
///
/// Unknown `x = (q, p)` at the new time level; residual
/// `F(x) = (x − xₙ)/h − J∇H((x + xₙ)/2)` with `J∇H = (∂H/∂p, −∂H/∂q)`.
pub fn newton_implicit_step(
    model: &dyn HamiltonianModel,
    state: &PhaseState,
    h: f64,
    opts: &NewtonOptions,
) -> Result<StepReport> {
    if h == 0.0 {
        return Ok(StepReport {
            new_state: *state,
            iterations_used: 0,
            final_residual: 0.0,
        });
    }
    let xn = state.to_vector();
    let t_mid = state.t + 0.5 * h;
    let residual = |x: &DVector<f64>| -> Result<DVector<f64>> {
        let x = SVector::<f64, 12>::from_column_slice(x.as_slice());
        let mid = PhaseState::from_vector(&((x + xn) * 0.5), t_mid);
        let dq = model.dh_dp(&mid)?;
        let dp = model.dh_dq(&mid)?;
        let rate = (x - xn) / h;
        let mut f = DVector::zeros(12);
        for i in 0..6 {
            f[i] = rate[i] - dq[i];
            f[i + 6] = rate[i + 6] + dp[i];
        }
        Ok(f)
    };
    let sol = newton_solve(residual, DVector::from_column_slice(xn.as_slice()), opts)?;
    let x = SVector::<f64, 12>::from_column_slice(sol.x.as_slice());
    Ok(StepReport {
        new_state: PhaseState::from_vector(&x, state.t + h),
        iterations_used: sol.iterations,
        final_residual: sol.residual_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LevitronModel, LevitronParams, OscillatorModel};

    #[test]
    fn scalar_square_root() {
        let f = |x: &DVector<f64>| Ok(DVector::from_element(1, x[0] * x[0] - 4.0));
        let opts = NewtonOptions {
            tol: 1e-12,
            ..Default::default()
        };
        let sol = newton_solve(f, DVector::from_element(1, 3.0), &opts).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-12);
        assert!(sol.iterations <= 6, "{}", sol.iterations);
        // quadratic decay: r_{k+1} ≲ C r_k² with C = |f''/(2 f'^2)| ≈ 1/16 near the root
        for w in sol.history.windows(2) {
            if w[0] < 1.0 && w[1] > 1e-11 {
                assert!(w[1] <= 0.2 * w[0] * w[0], "{} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn affine_residual_takes_one_iteration() {
        let model = OscillatorModel::new(1.3, 2.0).unwrap();
        let s = PhaseState::new(
            [1.0, -0.5, 0.2, 0.0, 0.3, 0.0],
            [0.2, 0.0, -1.0, 0.4, 0.0, 0.1],
            0.0,
        );
        let r = newton_implicit_step(&model, &s, 0.05, &NewtonOptions::default()).unwrap();
        assert_eq!(r.iterations_used, 1);
        assert!(r.final_residual <= 1e-4);
    }

    #[test]
    fn returned_state_satisfies_residual() {
        let model = LevitronModel::new(LevitronParams::new(0.05, 0.1, 8.2).unwrap());
        let s = PhaseState::new(
            [0.01, 0.0, 1.72, 0.05, 0.0, 0.0],
            [0.0, 0.01, 0.0, 0.0, 0.999, 1.0],
            0.0,
        );
        let h = 1e-3;
        let r = newton_implicit_step(&model, &s, h, &NewtonOptions::default()).unwrap();
        let x = r.new_state;
        let mid = crate::integrators::midpoint(&s, &x);
        let dq = model.dh_dp(&mid).unwrap();
        let dp = model.dh_dq(&mid).unwrap();
        let fq = (x.q - s.q) / h - dq;
        let fp = (x.p - s.p) / h + dp;
        let norm = (fq.norm_squared() + fp.norm_squared()).sqrt();
        assert!(norm <= 1e-4, "{norm}");
        assert_eq!(x.p[5], s.p[5]);
    }

    #[test]
    fn singular_jacobian_is_reported() {
        // F does not depend on x0
        let f = |x: &DVector<f64>| Ok(DVector::from_vec(vec![x[1] - 1.0, 3.0 * (x[1] - 1.0)]));
        let r = newton_solve(
            f,
            DVector::from_vec(vec![0.0, 0.0]),
            &NewtonOptions::default(),
        );
        assert!(matches!(r, Err(Error::SingularJacobian { .. })), "{r:?}");
    }

    #[test]
    fn max_iterations_is_reported() {
        // no real root
        let f = |x: &DVector<f64>| Ok(DVector::from_element(1, x[0] * x[0] + 1.0));
        let opts = NewtonOptions {
            max_iters: 5,
            ..Default::default()
        };
        let r = newton_solve(f, DVector::from_element(1, 0.5), &opts);
        assert!(matches!(r, Err(Error::MaxIterations { .. })), "{r:?}");
    }
}
