use nalgebra::{Matrix3, Vector3};

/// Value, gradient and Hessian of the ring-dipole potential at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiDerivatives {
    pub value: f64,
    pub grad: Vector3<f64>,
    pub hess: Matrix3<f64>,
}

/// Nondimensional ring-dipole potential
///
/// `Ψ = Z/(1+Z²)^{3/2} − (X²+Y²)·(3/4)·(2Z²−3)Z/(1+Z²)^{7/2}`
///
/// written as `Ψ = f(Z) − ρ² g(Z)` with `ρ² = X² + Y²`. All derivatives are
/// closed forms of `f` and `g`; note `f'' = 4g`.
pub fn psi(pos: &Vector3<f64>) -> PsiDerivatives {
    let (x, y, z) = (pos[0], pos[1], pos[2]);
    let rho2 = x * x + y * y;
    let z2 = z * z;
    let s = 1.0 + z2;
    let sqrt_s = s.sqrt();
    // s^{-k/2} for the odd powers we need
    let s_m3 = 1.0 / (s * sqrt_s);
    let s_m5 = s_m3 / s;
    let s_m7 = s_m5 / s;
    let s_m9 = s_m7 / s;
    let s_m11 = s_m9 / s;

    let f = z * s_m3;
    let f1 = (1.0 - 2.0 * z2) * s_m5;
    let g = 0.75 * (2.0 * z2 - 3.0) * z * s_m7;
    let f2 = 4.0 * g;
    let g1 = 0.75 * (-8.0 * z2 * z2 + 24.0 * z2 - 3.0) * s_m9;
    let g2 = 0.75 * z * (40.0 * z2 * z2 - 200.0 * z2 + 75.0) * s_m11;

    let value = f - rho2 * g;
    let grad = Vector3::new(-2.0 * x * g, -2.0 * y * g, f1 - rho2 * g1);

    let hxx = -2.0 * g;
    let hxz = -2.0 * x * g1;
    let hyz = -2.0 * y * g1;
    let hzz = f2 - rho2 * g2;
    #[rustfmt::skip]
    let hess = Matrix3::new(
        hxx, 0.0, hxz,
        0.0, hxx, hyz,
        hxz, hyz, hzz,
    );

    PsiDerivatives { value, grad, hess }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vanishes_at_origin() {
        assert_eq!(psi(&Vector3::zeros()).value, 0.0);
    }

    #[test]
    fn on_axis_value() {
        let d = psi(&Vector3::new(0.0, 0.0, 1.0));
        assert_relative_eq!(d.value, 2f64.powf(-1.5), epsilon = 1e-15);
        assert_relative_eq!(d.value, 0.353553, epsilon = 1e-6);
    }

    #[test]
    fn even_in_x() {
        let a = psi(&Vector3::new(0.1, 0.0, 1.0));
        let b = psi(&Vector3::new(-0.1, 0.0, 1.0));
        assert_eq!(a.value, b.value);
        assert_eq!(a.grad[0], -b.grad[0]);
        assert!(a.grad[0] != 0.0);
    }

    #[test]
    fn on_axis_transverse_gradient_is_zero() {
        for z in [-2.0, -0.3, 0.0, 0.7, 1.72, 5.0] {
            let d = psi(&Vector3::new(0.0, 0.0, z));
            assert_eq!(d.grad[0], 0.0);
            assert_eq!(d.grad[1], 0.0);
        }
    }

    #[test]
    fn hessian_is_symmetric() {
        let d = psi(&Vector3::new(0.3, -0.7, 1.2));
        assert_eq!(d.hess, d.hess.transpose());
    }

    fn value_at(p: Vector3<f64>) -> f64 {
        psi(&p).value
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let points = [
            Vector3::new(0.0, 0.0, 1.72),
            Vector3::new(0.3, -0.2, 1.5),
            Vector3::new(-1.1, 0.4, -0.6),
            Vector3::new(0.05, 0.9, 3.0),
        ];
        let eps = 1e-5;
        for p in points {
            let d = psi(&p);
            for i in 0..3 {
                let mut e = Vector3::zeros();
                e[i] = eps;
                let fd = (value_at(p + e) - value_at(p - e)) / (2.0 * eps);
                assert_relative_eq!(d.grad[i], fd, epsilon = 1e-9, max_relative = 1e-7);
                let gd = (psi(&(p + e)).grad - psi(&(p - e)).grad) / (2.0 * eps);
                for j in 0..3 {
                    assert_relative_eq!(d.hess[(j, i)], gd[j], epsilon = 1e-9, max_relative = 1e-7);
                }
            }
        }
    }
}
