//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use levsplit::model::HamiltonianModel;
use levsplit::{PhaseState, Vec6};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Central differences of the energy with step `1e-6·max(1, |x|)` per coordinate.
pub fn fd_gradients(model: &dyn HamiltonianModel, s: &PhaseState) -> (Vec6, Vec6) {
    let mut dq = Vec6::zeros();
    let mut dp = Vec6::zeros();
    for i in 0..6 {
        let d = 1e-6 * s.q[i].abs().max(1.0);
        let (mut hi, mut lo) = (*s, *s);
        hi.q[i] += d;
        lo.q[i] -= d;
        dq[i] = (model.energy(&hi).unwrap() - model.energy(&lo).unwrap()) / (hi.q[i] - lo.q[i]);

        let d = 1e-6 * s.p[i].abs().max(1.0);
        let (mut hi, mut lo) = (*s, *s);
        hi.p[i] += d;
        lo.p[i] -= d;
        dp[i] = (model.energy(&hi).unwrap() - model.energy(&lo).unwrap()) / (hi.p[i] - lo.p[i]);
    }
    (dq, dp)
}

/// Largest `|a − b| / max(1, |a|)` over the components.
pub fn max_rel_error(analytic: &Vec6, fd: &Vec6) -> f64 {
    analytic
        .iter()
        .zip(fd.iter())
        .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Random Levitron state away from the poles of the tilt angle.
pub fn random_top_state(rng: &mut ChaCha8Rng) -> PhaseState {
    let q = [
        rng.gen_range(-0.5..0.5),
        rng.gen_range(-0.5..0.5),
        rng.gen_range(0.5..3.0),
        rng.gen_range(0.3..PI - 0.3),
        rng.gen_range(0.0..2.0 * PI),
        rng.gen_range(0.0..2.0 * PI),
    ];
    let mut p = [0.0; 6];
    for v in &mut p {
        *v = rng.gen_range(-1.5..1.5);
    }
    PhaseState::new(q, p, 0.0)
}

/// Scalar bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    assert!(f_lo * f(hi) < 0.0, "bracket does not straddle a root");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `q(t)` and `p(t)` of the unit oscillator `H = ½p² + ½ω²q²` (unit mass), per axis.
pub fn oscillator_exact(s: &PhaseState, omega: f64, t: f64) -> PhaseState {
    let (sn, cs) = (omega * t).sin_cos();
    let mut out = *s;
    for i in 0..6 {
        out.q[i] = s.q[i] * cs + s.p[i] / omega * sn;
        out.p[i] = -s.q[i] * omega * sn + s.p[i] * cs;
    }
    out.t = s.t + t;
    out
}
