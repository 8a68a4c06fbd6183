use nalgebra::{SVector, Vector6};

/// Generalized coordinates or momenta of the six-degree-of-freedom top.
pub type Vec6 = Vector6<f64>;

/// A point in the 12-dimensional phase space plus the time it belongs to.
///
/// `q = (X, Y, Z, θ, ψ, φ)` in nondimensional units, `p` the conjugate momenta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub q: Vec6,
    pub p: Vec6,
    pub t: f64,
}

impl PhaseState {
    pub fn new(q: [f64; 6], p: [f64; 6], t: f64) -> Self {
        Self {
            q: Vec6::from(q),
            p: Vec6::from(p),
            t,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.q.iter().chain(self.p.iter()).all(|v| v.is_finite())
    }

    /// Packs the state as `x = (q1..q6, p1..p6)`.
    pub fn to_vector(&self) -> SVector<f64, 12> {
        let mut x = SVector::<f64, 12>::zeros();
        x.fixed_rows_mut::<6>(0).copy_from(&self.q);
        x.fixed_rows_mut::<6>(6).copy_from(&self.p);
        x
    }

    pub fn from_vector(x: &SVector<f64, 12>, t: f64) -> Self {
        Self {
            q: x.fixed_rows::<6>(0).into_owned(),
            p: x.fixed_rows::<6>(6).into_owned(),
            t,
        }
    }

    /// Euclidean distance between the centers of mass `(q1, q2, q3)`.
    pub fn position_distance(&self, other: &PhaseState) -> f64 {
        (self.q.fixed_rows::<3>(0) - other.q.fixed_rows::<3>(0)).norm()
    }

    /// Euclidean distance over the full 12-vector.
    pub fn state_distance(&self, other: &PhaseState) -> f64 {
        ((self.q - other.q).norm_squared() + (self.p - other.p).norm_squared()).sqrt()
    }

    /// `self + Σ wᵢ (xᵢ − self)`: an affine combination written in increment form,
    /// so any component that all `xᵢ` share with `self` is reproduced bit-exactly.
    pub fn affine_increment(&self, terms: &[(f64, PhaseState)], t: f64) -> PhaseState {
        let mut dq = Vec6::zeros();
        let mut dp = Vec6::zeros();
        for (w, x) in terms {
            dq += (x.q - self.q) * *w;
            dp += (x.p - self.p) * *w;
        }
        PhaseState {
            q: self.q + dq,
            p: self.p + dp,
            t,
        }
    }
}
