//! First-order shape-calculus kernels as linear forms in `(θ(y), ∇θ(y))`,
//! `y = φ_t⁻¹(x)`.
//!
//! Each kernel (`m′`, `F′_xx`, `F′_xt`, `b′`, `A′`, `f₁`, `w₁`) is the derivative
//! at `θ = 0` of a quantity built from the space-time deformation
//! `Θ(t, x) = (t, φ_t(y + θ(y)))`. They are linear in `θ`, so we store the
//! coefficients once per evaluation point and contract them with any `θ`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::motion::{Mat, Motion, MotionError, Point, Rotation2D};

/// `value(θ) = a · θ(y) + B : ∇θ(y)`, where `(∇θ)_{kl} = ∂θ_k/∂y_l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullbackLinearForm<const D: usize> {
    pub a: Point<D>,
    pub b: Mat<D>,
}

/// One linear form per vector component.
pub type FormVector<const D: usize> = [PullbackLinearForm<D>; D];
/// One linear form per matrix entry, indexed `[row][col]`.
pub type FormMatrix<const D: usize> = [[PullbackLinearForm<D>; D]; D];

impl<const D: usize> PullbackLinearForm<D> {
    pub fn zero() -> Self {
        Self { a: Point::<D>::zeros(), b: Mat::<D>::zeros() }
    }

    pub fn new(a: Point<D>, b: Mat<D>) -> Self {
        Self { a, b }
    }

    /// The form `θ ↦ div θ(y)`.
    pub fn divergence() -> Self {
        Self { a: Point::<D>::zeros(), b: Mat::<D>::identity() }
    }

    pub fn value(&self, theta: &Point<D>, grad_theta: &Mat<D>) -> f64 {
        self.a.dot(theta) + self.b.component_mul(grad_theta).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|v| *v == 0.0) && self.b.iter().all(|v| *v == 0.0)
    }
}

impl<const D: usize> Default for PullbackLinearForm<D> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const D: usize> Add for PullbackLinearForm<D> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { a: self.a + rhs.a, b: self.b + rhs.b }
    }
}

impl<const D: usize> Sub for PullbackLinearForm<D> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { a: self.a - rhs.a, b: self.b - rhs.b }
    }
}

impl<const D: usize> Neg for PullbackLinearForm<D> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { a: -self.a, b: -self.b }
    }
}

impl<const D: usize> Mul<f64> for PullbackLinearForm<D> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self { a: self.a * s, b: self.b * s }
    }
}

pub fn contract_vector<const D: usize>(
    forms: &FormVector<D>,
    theta: &Point<D>,
    grad_theta: &Mat<D>,
) -> Point<D> {
    Point::<D>::from_fn(|i, _| forms[i].value(theta, grad_theta))
}

pub fn contract_matrix<const D: usize>(
    forms: &FormMatrix<D>,
    theta: &Point<D>,
    grad_theta: &Mat<D>,
) -> Mat<D> {
    Mat::<D>::from_fn(|i, j| forms[i][j].value(theta, grad_theta))
}

/// Motion data at one physical point, shared by all kernels.
#[derive(Debug, Clone)]
pub struct KernelPoint<const D: usize> {
    pub t: f64,
    pub x: Point<D>,
    /// Reference point `y = φ_t⁻¹(x)`.
    pub y: Point<D>,
    /// `G = ∇φ_t(y)`.
    pub g: Mat<D>,
    pub g_inv: Mat<D>,
    /// `H_k = ∂_k ∇φ_t(y)`.
    pub h: [Mat<D>; D],
    /// `∇(∂φ_t/∂t)(y)`.
    pub gdot: Mat<D>,
    /// `∂/∂t φ_t⁻¹(x)`.
    pub ydot: Point<D>,
}

impl<const D: usize> KernelPoint<D> {
    pub fn new(motion: &dyn Motion<D>, t: f64, x: &Point<D>) -> Result<Self, MotionError> {
        let y = motion.inverse(t, x)?;
        let g = motion.grad(t, &y);
        let g_inv = g.try_inverse().ok_or(MotionError::Singular { t })?;
        let ydot = -(g_inv * motion.dt(t, &y));
        Ok(Self { t, x: *x, y, g, g_inv, h: motion.grad2(t, &y), gdot: motion.dt_grad(t, &y), ydot })
    }

    /// `m′(0)(θ) = tr([∇²φ_t θ] ∇φ_t⁻¹) + div θ`.
    pub fn m_prime(&self) -> PullbackLinearForm<D> {
        let a = Point::<D>::from_fn(|k, _| (self.h[k] * self.g_inv).trace());
        PullbackLinearForm::new(a, Mat::<D>::identity())
    }

    /// `F′_xx(0)(θ) = [∇²φ_t θ] ∇φ_t⁻¹ + ∇φ_t ∇θ ∇φ_t⁻¹`.
    pub fn fxx_prime(&self) -> FormMatrix<D> {
        let hg: [Mat<D>; D] = std::array::from_fn(|k| self.h[k] * self.g_inv);
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let a = Point::<D>::from_fn(|k, _| hg[k][(i, j)]);
                let b = Mat::<D>::from_fn(|k, l| self.g[(i, k)] * self.g_inv[(l, j)]);
                PullbackLinearForm::new(a, b)
            })
        })
    }

    /// `F′_xt(0)(θ) = ∇(∂_tφ_t) θ + [∇²φ_t θ] ∂_tφ_t⁻¹ + ∇φ_t ∇θ ∂_tφ_t⁻¹`.
    pub fn fxt_prime(&self) -> FormVector<D> {
        let hy: [Point<D>; D] = std::array::from_fn(|k| self.h[k] * self.ydot);
        std::array::from_fn(|i| {
            let a = Point::<D>::from_fn(|k, _| self.gdot[(i, k)] + hy[k][i]);
            let b = Mat::<D>::from_fn(|k, l| self.g[(i, k)] * self.ydot[l]);
            PullbackLinearForm::new(a, b)
        })
    }

    /// `b′(0)(θ) = −F′_xt(0)(θ)`.
    pub fn b_prime(&self) -> FormVector<D> {
        self.fxt_prime().map(|f| -f)
    }

    /// `A′(0)(θ) = m′ I − F′_xx − F′_xxᵀ`.
    pub fn a_prime(&self) -> FormMatrix<D> {
        let m = self.m_prime();
        let f = self.fxx_prime();
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let diag = if i == j { m } else { PullbackLinearForm::zero() };
                diag - f[i][j] - f[j][i]
            })
        })
    }

    /// `f₁(θ) = (∇φ_tᵀ ∇f) · θ` for a scalar field with spatial gradient `grad_f` at `(t, x)`.
    pub fn scalar_derivative(&self, grad_f: &Point<D>) -> PullbackLinearForm<D> {
        PullbackLinearForm::new(self.g.transpose() * grad_f, Mat::<D>::zeros())
    }

    /// `w₁(θ) = ∇w ∇φ_t θ` for a vector field with Jacobian `grad_w` at `(t, x)`.
    pub fn vector_derivative(&self, grad_w: &Mat<D>) -> FormVector<D> {
        let wg = grad_w * self.g;
        std::array::from_fn(|i| {
            PullbackLinearForm::new(Point::<D>::from_fn(|k, _| wg[(i, k)]), Mat::<D>::zeros())
        })
    }

    /// The transported velocity `V(t, x) = ∇φ_t(y) θ(y)`; all kernels above are
    /// derivatives of this field (`m′ = div V`, `F′_xx = ∇V`, `F′_xt = ∂_t V`).
    pub fn transported(&self) -> FormVector<D> {
        std::array::from_fn(|i| {
            PullbackLinearForm::new(Point::<D>::from_fn(|k, _| self.g[(i, k)]), Mat::<D>::zeros())
        })
    }
}

pub fn m_prime<const D: usize>(
    motion: &dyn Motion<D>,
    t: f64,
    x: &Point<D>,
) -> Result<PullbackLinearForm<D>, MotionError> {
    Ok(KernelPoint::new(motion, t, x)?.m_prime())
}

pub fn fxx_prime<const D: usize>(
    motion: &dyn Motion<D>,
    t: f64,
    x: &Point<D>,
) -> Result<FormMatrix<D>, MotionError> {
    Ok(KernelPoint::new(motion, t, x)?.fxx_prime())
}

pub fn fxt_prime<const D: usize>(
    motion: &dyn Motion<D>,
    t: f64,
    x: &Point<D>,
) -> Result<FormVector<D>, MotionError> {
    Ok(KernelPoint::new(motion, t, x)?.fxt_prime())
}

pub fn b_prime<const D: usize>(
    motion: &dyn Motion<D>,
    t: f64,
    x: &Point<D>,
) -> Result<FormVector<D>, MotionError> {
    Ok(KernelPoint::new(motion, t, x)?.b_prime())
}

pub fn a_prime<const D: usize>(
    motion: &dyn Motion<D>,
    t: f64,
    x: &Point<D>,
) -> Result<FormMatrix<D>, MotionError> {
    Ok(KernelPoint::new(motion, t, x)?.a_prime())
}

/// `f₁` for a scalar field given by its spatial gradient at `(t, x)`.
pub fn pullback_scalar_derivative<const D: usize>(
    grad_f: &Point<D>,
    motion: &dyn Motion<D>,
    t: f64,
    x: &Point<D>,
) -> Result<PullbackLinearForm<D>, MotionError> {
    Ok(KernelPoint::new(motion, t, x)?.scalar_derivative(grad_f))
}

/// `w₁` for a vector field given by its spatial Jacobian at `(t, x)`.
pub fn pullback_vector_derivative<const D: usize>(
    grad_w: &Mat<D>,
    motion: &dyn Motion<D>,
    t: f64,
    x: &Point<D>,
) -> Result<FormVector<D>, MotionError> {
    Ok(KernelPoint::new(motion, t, x)?.vector_derivative(grad_w))
}

/// Closed forms of the kernels for a rigid rotation, evaluated for a given
/// `θ(y)` and `∇θ(y)`. Used to cross-check the generic path.
pub mod rotation {
    use super::*;

    /// `m′ = div θ`.
    pub fn m_prime(grad_theta: &Mat<2>) -> f64 {
        grad_theta.trace()
    }

    /// `F′_xx = R_α ∇θ R_{−α}`.
    pub fn fxx_prime(motion: &Rotation2D, t: f64, grad_theta: &Mat<2>) -> Mat<2> {
        let r = motion.rotation(t);
        r * grad_theta * r.transpose()
    }

    /// `F′_xt = (dR_α/dt) θ + R_α ∇θ (dR_{−α}/dt) x`.
    pub fn fxt_prime(
        motion: &Rotation2D,
        t: f64,
        x: &Point<2>,
        theta: &Point<2>,
        grad_theta: &Mat<2>,
    ) -> Point<2> {
        motion.rotation_dt(t) * theta
            + motion.rotation(t) * grad_theta * (motion.inverse_rotation_dt(t) * x)
    }

    /// `A′ = (div θ) I − F′_xx − F′_xxᵀ`.
    pub fn a_prime(motion: &Rotation2D, t: f64, grad_theta: &Mat<2>) -> Mat<2> {
        let f = fxx_prime(motion, t, grad_theta);
        Mat::<2>::identity() * m_prime(grad_theta) - f - f.transpose()
    }

    /// `f₁ = ∇f · R_α θ`.
    pub fn scalar_derivative(motion: &Rotation2D, t: f64, grad_f: &Point<2>, theta: &Point<2>) -> f64 {
        grad_f.dot(&(motion.rotation(t) * theta))
    }

    /// `w₁ = ∇w R_α θ`.
    pub fn vector_derivative(motion: &Rotation2D, t: f64, grad_w: &Mat<2>, theta: &Point<2>) -> Point<2> {
        grad_w * motion.rotation(t) * theta
    }

    /// `∇v = α′ [[0, −1], [1, 0]]`.
    pub fn velocity_grad(motion: &Rotation2D) -> Mat<2> {
        Mat::<2>::new(0.0, -1.0, 1.0, 0.0) * motion.angular_speed()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::{Identity, Polynomial1D};

    #[test]
    fn identity_kernels_are_trivial() {
        let m = Identity::<2>::new(1.0);
        let kp = KernelPoint::new(&m, 0.3, &Point::<2>::new(0.1, 0.2)).unwrap();
        assert_eq!(kp.m_prime(), PullbackLinearForm::divergence());
        let fxt = kp.fxt_prime();
        assert!(fxt.iter().all(|f| f.is_zero()));
        let g = Mat::<2>::new(1.0, 2.0, 3.0, 4.0);
        let th = Point::<2>::new(0.5, -0.5);
        assert!((contract_matrix(&kp.fxx_prime(), &th, &g) - g).norm() < 1e-15);
        let a = contract_matrix(&kp.a_prime(), &th, &g);
        assert!((a - (Mat::<2>::identity() * 5.0 - g - g.transpose())).norm() < 1e-15);
    }

    #[test]
    fn polynomial_m_prime_has_curvature_term() {
        let m = Polynomial1D::default();
        let (t, y) = (0.5, 0.4);
        let x = Point::<1>::new(Polynomial1D::map(t, y));
        let form = m_prime(&m, t, &x).unwrap();
        assert!((form.a[0] - 2.0 * t / (1.0 + 2.0 * t * y)).abs() < 1e-14);
        assert_eq!(form.b[(0, 0)], 1.0);
    }

    #[test]
    fn domain_errors_propagate() {
        let m = Polynomial1D::default();
        assert!(m_prime(&m, 1.0, &Point::<1>::new(3.0)).is_err());
    }
}
