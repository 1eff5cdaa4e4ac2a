//! Difference quotients of perturbed motion maps, the oracle for the
//! motion kernels.
#![allow(dead_code)]

use stshapeopt::kernel::{contract_matrix, contract_vector, KernelPoint};
use stshapeopt::motion::{Mat, Motion, Point};

/// A smooth deformation field `θ(y)` and its Jacobian.
pub type ThetaFn<const D: usize> = fn(&Point<D>) -> (Point<D>, Mat<D>);

pub fn theta1(y: &Point<1>) -> (Point<1>, Mat<1>) {
    let s = y[0];
    (Point::<1>::new((2.0 * s).sin() + 0.3), Mat::<1>::new(2.0 * (2.0 * s).cos()))
}

pub fn theta2(y: &Point<2>) -> (Point<2>, Mat<2>) {
    let (a, b) = (y[0], y[1]);
    (
        Point::<2>::new(a * b + 0.2, (a - b).sin()),
        Mat::<2>::new(b, a, (a - b).cos(), -(a - b).cos()),
    )
}

/// Quantities of the perturbed map `x ↦ φ_t(y + εθ(y))`, `y = φ_t⁻¹(x)`.
pub struct Perturbed<const D: usize> {
    pub fxx: Mat<D>,
    pub fxt: Point<D>,
    pub m: f64,
    pub a: Mat<D>,
    /// `f(t, x_ε)` with `f = |x|²`.
    pub f: f64,
    /// `v(t, x_ε)`, the motion velocity at the moved point.
    pub w: Point<D>,
    pub x: Point<D>,
}

pub fn perturbed<const D: usize>(motion: &dyn Motion<D>, theta: ThetaFn<D>, t: f64, x: &Point<D>, eps: f64) -> Perturbed<D> {
    let y = motion.inverse(t, x).unwrap();
    let (th, dth) = theta(&y);
    let ye = y + th * eps;
    let g = motion.grad(t, &y);
    let g_inv = g.try_inverse().unwrap();
    let fxx = motion.grad(t, &ye) * (Mat::<D>::identity() + dth * eps) * g_inv;
    // ∂_t of t ↦ φ_t(y(t) + εθ(y(t))) at fixed x, y(t) = φ_t⁻¹(x).
    let ydot = -(g_inv * motion.dt(t, &y));
    let fxt = motion.dt(t, &ye) + motion.grad(t, &ye) * (Mat::<D>::identity() + dth * eps) * ydot;
    let m = stshapeopt::motion::determinant(&fxx);
    let fi = fxx.try_inverse().unwrap();
    let a = fi * fi.transpose() * m;
    let xe = motion.forward(t, &ye);
    Perturbed { fxx, fxt, m, a, f: xe.norm_squared(), w: motion.velocity(t, &xe).unwrap(), x: xe }
}

/// Forward difference quotients at ε ∈ {1e-3, 1e-4, 1e-5} against the kernel
/// values; returns the relative errors.
pub fn errors<const D: usize>(motion: &dyn Motion<D>, theta: ThetaFn<D>, t: f64, x: &Point<D>) -> Vec<(&'static str, [f64; 3])> {
    let kp = KernelPoint::new(motion, t, x).unwrap();
    let (th, dth) = theta(&kp.y);
    let base = perturbed(motion, theta, t, x, 0.0);
    let m = kp.m_prime().value(&th, &dth);
    let fxx = contract_matrix(&kp.fxx_prime(), &th, &dth);
    let fxt = contract_vector(&kp.fxt_prime(), &th, &dth);
    let a = contract_matrix(&kp.a_prime(), &th, &dth);
    let f1 = kp.scalar_derivative(&(x * 2.0)).value(&th, &dth);
    let grad_v = motion.velocity_grad(t, x).unwrap();
    let w1 = contract_vector(&kp.vector_derivative(&grad_v), &th, &dth);
    let epss = [1e-3, 1e-4, 1e-5];
    let mut out: Vec<(&'static str, [f64; 3])> = Vec::new();
    let mut record = |name, k: usize, err: f64, scale: f64| {
        if let Some(e) = out.iter_mut().find(|e| e.0 == name) {
            e.1[k] = err / (scale + 1e-14);
        } else {
            let mut v = [0.0; 3];
            v[k] = err / (scale + 1e-14);
            out.push((name, v));
        }
    };
    for (k, &eps) in epss.iter().enumerate() {
        let p = perturbed(motion, theta, t, x, eps);
        record("m'", k, ((p.m - base.m) / eps - m).abs(), m.abs());
        record("F'_xx", k, ((p.fxx - base.fxx) / eps - fxx).norm(), fxx.norm());
        record("F'_xt", k, ((p.fxt - base.fxt) / eps - fxt).norm(), fxt.norm());
        record("A'", k, ((p.a - base.a) / eps - a).norm(), a.norm());
        record("f1", k, ((p.f - base.f) / eps - f1).abs(), f1.abs());
        record("w1", k, ((p.w - base.w) / eps - w1).norm(), w1.norm());
        // The moved point itself is the transported velocity.
        let v = contract_vector(&kp.transported(), &th, &dth);
        record("V", k, ((p.x - base.x) / eps - v).norm(), v.norm());
    }
    out
}

