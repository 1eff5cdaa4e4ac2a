//! Analytic motions `φ_t` of the design domain.
//!
//! A motion maps a reference point `y` of the fixed domain `D` to its position
//! `x = φ_t(y)` at time `t`. Every derivative used by the shape calculus is
//! hand-coded; nothing here differentiates numerically.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{SMatrix, SVector};
use thiserror::Error;

/// A point (or vector) of `R^D`.
pub type Point<const D: usize> = SVector<f64, D>;
/// A `D × D` matrix.
pub type Mat<const D: usize> = SMatrix<f64, D, D>;

const INVERSE_TOL: f64 = 1e-14;
const INVERSE_MAX_ITER: usize = 50;
/// Slack allowed when deciding whether a point lies in the image `φ_t(D)`.
pub const DOMAIN_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MotionError {
    #[error("point {x:?} at t = {t} lies outside the image of the reference domain")]
    OutsideDomain { t: f64, x: Vec<f64> },
    #[error("inverse motion did not converge at t = {t}, x = {x:?} (last update {residual:e})")]
    InverseDiverged { t: f64, x: Vec<f64>, residual: f64 },
    #[error("motion Jacobian is singular at t = {t}")]
    Singular { t: f64 },
}

/// A smooth time-dependent diffeomorphism `φ_t` of `R^D`.
///
/// Conventions: `y` is a reference point, `x = φ_t(y)` a physical one.
/// `grad2(t, y)[k]` is the matrix `∂/∂y_k ∇φ_t(y)`, so that
/// `(∇²φ_t θ)_{ij} = Σ_k grad2[k][(i, j)] θ_k`.
pub trait Motion<const D: usize>: Send + Sync {
    fn forward(&self, t: f64, y: &Point<D>) -> Point<D>;
    fn inverse(&self, t: f64, x: &Point<D>) -> Result<Point<D>, MotionError>;
    fn grad(&self, t: f64, y: &Point<D>) -> Mat<D>;
    fn grad2(&self, t: f64, y: &Point<D>) -> [Mat<D>; D];
    /// `∂φ_t/∂t` at a reference point.
    fn dt(&self, t: f64, y: &Point<D>) -> Point<D>;
    /// `∇(∂φ_t/∂t)` at a reference point.
    fn dt_grad(&self, t: f64, y: &Point<D>) -> Mat<D>;
    /// Time period `T` of the motion.
    fn period(&self) -> f64;

    fn det(&self, t: f64, y: &Point<D>) -> f64 {
        determinant(&self.grad(t, y))
    }

    /// Eulerian velocity `v(t, x) = ∂φ_t/∂t (φ_t⁻¹(x))`.
    fn velocity(&self, t: f64, x: &Point<D>) -> Result<Point<D>, MotionError> {
        let y = self.inverse(t, x)?;
        Ok(self.dt(t, &y))
    }

    /// `∇v(t, x) = ∇(∂φ_t/∂t)(y) [∇φ_t(y)]⁻¹`.
    fn velocity_grad(&self, t: f64, x: &Point<D>) -> Result<Mat<D>, MotionError> {
        let y = self.inverse(t, x)?;
        let g_inv = self.grad(t, &y).try_inverse().ok_or(MotionError::Singular { t })?;
        Ok(self.dt_grad(t, &y) * g_inv)
    }

    fn velocity_div(&self, t: f64, x: &Point<D>) -> Result<f64, MotionError> {
        Ok(self.velocity_grad(t, x)?.trace())
    }

    /// `∂/∂t (φ_t⁻¹(x)) = −[∇φ_t(y)]⁻¹ ∂φ_t/∂t(y)`.
    fn inverse_dt(&self, t: f64, x: &Point<D>) -> Result<Point<D>, MotionError> {
        let y = self.inverse(t, x)?;
        let g_inv = self.grad(t, &y).try_inverse().ok_or(MotionError::Singular { t })?;
        Ok(-(g_inv * self.dt(t, &y)))
    }
}

/// Determinant of a small square matrix (closed form up to 3×3).
pub fn determinant<const D: usize>(m: &Mat<D>) -> f64 {
    match D {
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 => {
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        }
        _ => nalgebra::DMatrix::from_column_slice(D, D, m.as_slice()).determinant(),
    }
}

/// `φ_t = Id` for all times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Identity<const D: usize> {
    pub period: f64,
}

impl<const D: usize> Identity<D> {
    pub fn new(period: f64) -> Self {
        Self { period }
    }
}

impl<const D: usize> Motion<D> for Identity<D> {
    fn forward(&self, _t: f64, y: &Point<D>) -> Point<D> {
        *y
    }
    fn inverse(&self, _t: f64, x: &Point<D>) -> Result<Point<D>, MotionError> {
        Ok(*x)
    }
    fn grad(&self, _t: f64, _y: &Point<D>) -> Mat<D> {
        Mat::<D>::identity()
    }
    fn grad2(&self, _t: f64, _y: &Point<D>) -> [Mat<D>; D] {
        [Mat::<D>::zeros(); D]
    }
    fn dt(&self, _t: f64, _y: &Point<D>) -> Point<D> {
        Point::<D>::zeros()
    }
    fn dt_grad(&self, _t: f64, _y: &Point<D>) -> Mat<D> {
        Mat::<D>::zeros()
    }
    fn period(&self) -> f64 {
        self.period
    }
}

/// Rigid rotation about the origin by `α(t) = 2πt/T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation2D {
    pub period: f64,
}

impl Rotation2D {
    pub fn new(period: f64) -> Self {
        Self { period }
    }

    pub fn angle(&self, t: f64) -> f64 {
        2.0 * PI * t / self.period
    }

    /// `α'(t)`, constant for a uniform rotation.
    pub fn angular_speed(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn rotation(&self, t: f64) -> Mat<2> {
        rotation_matrix(self.angle(t))
    }

    /// `d/dt R_{α(t)}`.
    pub fn rotation_dt(&self, t: f64) -> Mat<2> {
        let (s, c) = self.angle(t).sin_cos();
        Mat::<2>::new(-s, -c, c, -s) * self.angular_speed()
    }

    /// `d/dt R_{−α(t)}`.
    pub fn inverse_rotation_dt(&self, t: f64) -> Mat<2> {
        let (s, c) = self.angle(t).sin_cos();
        Mat::<2>::new(-s, c, -c, -s) * self.angular_speed()
    }
}

pub fn rotation_matrix(alpha: f64) -> Mat<2> {
    let (s, c) = alpha.sin_cos();
    Mat::<2>::new(c, -s, s, c)
}

impl Motion<2> for Rotation2D {
    fn forward(&self, t: f64, y: &Point<2>) -> Point<2> {
        self.rotation(t) * y
    }
    fn inverse(&self, t: f64, x: &Point<2>) -> Result<Point<2>, MotionError> {
        Ok(rotation_matrix(-self.angle(t)) * x)
    }
    fn grad(&self, t: f64, _y: &Point<2>) -> Mat<2> {
        self.rotation(t)
    }
    fn grad2(&self, _t: f64, _y: &Point<2>) -> [Mat<2>; 2] {
        [Mat::<2>::zeros(); 2]
    }
    fn dt(&self, t: f64, y: &Point<2>) -> Point<2> {
        self.rotation_dt(t) * y
    }
    fn dt_grad(&self, t: f64, _y: &Point<2>) -> Mat<2> {
        self.rotation_dt(t)
    }
    fn period(&self) -> f64 {
        self.period
    }
    fn det(&self, _t: f64, _y: &Point<2>) -> f64 {
        1.0
    }
}

/// `φ_t(y) = y + t·y²` on the reference interval `domain`.
///
/// The map is strictly increasing on `[0, 1]` for `t ∈ [0, 1]`. The inverse is
/// seeded with the stable root of the quadratic and polished by Newton.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polynomial1D {
    pub period: f64,
    pub domain: [f64; 2],
}

impl Polynomial1D {
    pub fn new(period: f64) -> Self {
        Self { period, domain: [0.0, 1.0] }
    }

    #[inline]
    pub fn map(t: f64, y: f64) -> f64 {
        y + t * y * y
    }

    /// Scalar inverse without domain checks.
    pub fn invert(t: f64, x: f64) -> Result<f64, MotionError> {
        let disc = 1.0 + 4.0 * t * x;
        if !disc.is_finite() || disc < 0.0 {
            return Err(MotionError::OutsideDomain { t, x: vec![x] });
        }
        let mut y = 2.0 * x / (1.0 + disc.sqrt());
        let mut last = f64::INFINITY;
        for _ in 0..INVERSE_MAX_ITER {
            let slope = 1.0 + 2.0 * t * y;
            if slope <= 0.0 {
                return Err(MotionError::Singular { t });
            }
            let step = (Self::map(t, y) - x) / slope;
            y -= step;
            last = step.abs();
            if last <= INVERSE_TOL * y.abs().max(1.0) {
                return Ok(y);
            }
        }
        Err(MotionError::InverseDiverged { t, x: vec![x], residual: last })
    }
}

impl Default for Polynomial1D {
    fn default() -> Self {
        Self::new(1.0)
    }
}

impl Motion<1> for Polynomial1D {
    fn forward(&self, t: f64, y: &Point<1>) -> Point<1> {
        Point::<1>::new(Self::map(t, y[0]))
    }
    fn inverse(&self, t: f64, x: &Point<1>) -> Result<Point<1>, MotionError> {
        let y = Self::invert(t, x[0])?;
        let [a, b] = self.domain;
        if y < a - DOMAIN_SLACK || y > b + DOMAIN_SLACK {
            return Err(MotionError::OutsideDomain { t, x: vec![x[0]] });
        }
        Ok(Point::<1>::new(y))
    }
    fn grad(&self, t: f64, y: &Point<1>) -> Mat<1> {
        Mat::<1>::new(1.0 + 2.0 * t * y[0])
    }
    fn grad2(&self, t: f64, _y: &Point<1>) -> [Mat<1>; 1] {
        [Mat::<1>::new(2.0 * t)]
    }
    fn dt(&self, _t: f64, y: &Point<1>) -> Point<1> {
        Point::<1>::new(y[0] * y[0])
    }
    fn dt_grad(&self, _t: f64, y: &Point<1>) -> Mat<1> {
        Mat::<1>::new(2.0 * y[0])
    }
    fn period(&self) -> f64 {
        self.period
    }
}

type PointFn<const D: usize> = Arc<dyn Fn(f64, &Point<D>) -> Point<D> + Send + Sync>;
type MatFn<const D: usize> = Arc<dyn Fn(f64, &Point<D>) -> Mat<D> + Send + Sync>;
type HessFn<const D: usize> = Arc<dyn Fn(f64, &Point<D>) -> [Mat<D>; D] + Send + Sync>;
type InverseFn<const D: usize> =
    Arc<dyn Fn(f64, &Point<D>) -> Result<Point<D>, MotionError> + Send + Sync>;

/// A user-supplied motion. The caller is responsible for the consistency of
/// the closures (they are checked only by the tests that use them).
#[derive(Clone)]
pub struct Custom<const D: usize> {
    pub period: f64,
    pub forward: PointFn<D>,
    pub inverse: InverseFn<D>,
    pub grad: MatFn<D>,
    pub grad2: HessFn<D>,
    pub dt: PointFn<D>,
    pub dt_grad: MatFn<D>,
}

impl<const D: usize> fmt::Debug for Custom<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Custom").field("period", &self.period).finish_non_exhaustive()
    }
}

impl<const D: usize> Motion<D> for Custom<D> {
    fn forward(&self, t: f64, y: &Point<D>) -> Point<D> {
        (self.forward)(t, y)
    }
    fn inverse(&self, t: f64, x: &Point<D>) -> Result<Point<D>, MotionError> {
        (self.inverse)(t, x)
    }
    fn grad(&self, t: f64, y: &Point<D>) -> Mat<D> {
        (self.grad)(t, y)
    }
    fn grad2(&self, t: f64, y: &Point<D>) -> [Mat<D>; D] {
        (self.grad2)(t, y)
    }
    fn dt(&self, t: f64, y: &Point<D>) -> Point<D> {
        (self.dt)(t, y)
    }
    fn dt_grad(&self, t: f64, y: &Point<D>) -> Mat<D> {
        (self.dt_grad)(t, y)
    }
    fn period(&self) -> f64 {
        self.period
    }
}

/// Scalar shorthands for one-dimensional motions.
pub trait Motion1D {
    fn forward1(&self, t: f64, y: f64) -> f64;
    fn inverse1(&self, t: f64, x: f64) -> Result<f64, MotionError>;
    fn grad1(&self, t: f64, y: f64) -> f64;
    fn grad2_1(&self, t: f64, y: f64) -> f64;
    fn dt1(&self, t: f64, y: f64) -> f64;
    fn dt_grad1(&self, t: f64, y: f64) -> f64;
}

impl<M: Motion<1> + ?Sized> Motion1D for M {
    fn forward1(&self, t: f64, y: f64) -> f64 {
        self.forward(t, &Point::<1>::new(y))[0]
    }
    fn inverse1(&self, t: f64, x: f64) -> Result<f64, MotionError> {
        Ok(self.inverse(t, &Point::<1>::new(x))?[0])
    }
    fn grad1(&self, t: f64, y: f64) -> f64 {
        self.grad(t, &Point::<1>::new(y))[(0, 0)]
    }
    fn grad2_1(&self, t: f64, y: f64) -> f64 {
        self.grad2(t, &Point::<1>::new(y))[0][(0, 0)]
    }
    fn dt1(&self, t: f64, y: f64) -> f64 {
        self.dt(t, &Point::<1>::new(y))[0]
    }
    fn dt_grad1(&self, t: f64, y: f64) -> f64 {
        self.dt_grad(t, &Point::<1>::new(y))[(0, 0)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_round_trip() {
        let m = Polynomial1D::default();
        for &t in &[0.0, 0.25, 0.5, 1.0] {
            for k in 0..=20 {
                let y = k as f64 / 20.0;
                let x = m.forward1(t, y);
                assert!((m.inverse1(t, x).unwrap() - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn polynomial_rejects_points_outside_image() {
        let m = Polynomial1D::default();
        assert!(matches!(m.inverse1(1.0, 2.5), Err(MotionError::OutsideDomain { .. })));
        assert!(m.inverse1(1.0, -0.1).is_err());
    }

    #[test]
    fn velocity_matches_time_derivative_along_trajectories() {
        let m = Polynomial1D::default();
        let (t, y) = (0.3, 0.7);
        let x = m.forward1(t, y);
        assert!((m.velocity(t, &Point::<1>::new(x)).unwrap()[0] - y * y).abs() < 1e-14);
    }

    #[test]
    fn rotation_is_volume_preserving_and_divergence_free() {
        let m = Rotation2D::new(1.0);
        let y = Point::<2>::new(0.3, -0.8);
        for &t in &[0.0, 0.1, 0.77] {
            assert!((m.grad(t, &y).determinant() - 1.0).abs() < 1e-14);
            assert!(m.velocity_div(t, &m.forward(t, &y)).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_dt_matrices_are_consistent() {
        let m = Rotation2D::new(2.0);
        let t = 0.3;
        let h = 1e-6;
        let fd = (m.rotation(t + h) - m.rotation(t - h)) / (2.0 * h);
        assert!((fd - m.rotation_dt(t)).norm() < 1e-8);
        let fd_inv = (rotation_matrix(-m.angle(t + h)) - rotation_matrix(-m.angle(t - h))) / (2.0 * h);
        assert!((fd_inv - m.inverse_rotation_dt(t)).norm() < 1e-8);
    }
}
