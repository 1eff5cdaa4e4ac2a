//! The academic functional `J(Ω) = ∫_{Q_Ω} f(t, x) dx dt`.

use crate::functions::ScalarField;
use crate::kernel::KernelPoint;
use crate::materials::PhaseId;
use crate::mesh::{SpaceTimeMesh, SpatialField};
use crate::motion::{determinant, Mat, Motion, Motion1D, Point};
use crate::quadrature::{gauss_legendre, TriangleRule};

use super::ShapeError;

/// Rule used for the mesh-based academic integrals (exact for degree 7).
fn rule() -> TriangleRule {
    TriangleRule::collapsed_gauss(4)
}

/// `∫_{Q_Ω} f` over the elements of phase `phase`.
pub fn academic_objective(f: &dyn ScalarField, mesh: &SpaceTimeMesh, phase: PhaseId) -> f64 {
    let rule = rule();
    let mut total = 0.0;
    for (e, el) in mesh.elements.iter().enumerate() {
        if el.phase != phase {
            continue;
        }
        let geo = mesh.geometry(e);
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let [t, x] = geo.point(l);
            total += w * geo.area * f.value(t, x);
        }
    }
    total
}

/// Volume form `∫_{Q_Ω} m′(0)(θ) f + f₁(θ)`, with `m′` split into its
/// second-derivative and divergence parts, by element quadrature.
pub fn academic_volume_derivative(
    f: &dyn ScalarField,
    mesh: &SpaceTimeMesh,
    motion: &dyn Motion<1>,
    theta: &SpatialField,
    phase: PhaseId,
) -> Result<f64, ShapeError> {
    let spatial = &mesh.spatial;
    if theta.values.len() != spatial.n_nodes() {
        return Err(ShapeError::Dimension { expected: spatial.n_nodes(), got: theta.values.len() });
    }
    let rule = rule();
    let mut total = 0.0;
    for (e, el) in mesh.elements.iter().enumerate() {
        if el.phase != phase {
            continue;
        }
        let geo = mesh.geometry(e);
        let c = el.column;
        let h = spatial.length(c);
        let slope = (theta.values[c + 1] - theta.values[c]) / h;
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let [t, x] = geo.point(l);
            let kp = KernelPoint::new(motion, t, &Point::<1>::new(x))?;
            let s = ((kp.y[0] - spatial.nodes[c]) / h).clamp(0.0, 1.0);
            let th = Point::<1>::new(theta.values[c] * (1.0 - s) + theta.values[c + 1] * s);
            let dth = Mat::<1>::new(slope);
            let hessian_part = (kp.h[0] * kp.g_inv)[(0, 0)] * th[0];
            let divergence = slope;
            let f1 = kp.scalar_derivative(&Point::<1>::new(f.grad_x(t, x))).value(&th, &dth);
            total += w * geo.area * ((hessian_part + divergence) * f.value(t, x) + f1);
        }
    }
    Ok(total)
}

/// Surface form `Σ_ξ v_Ω(ξ) θ(ξ) n(ξ)` with
/// `v_Ω(ξ) = ∫_0^T |∇φ_t(ξ)| f(t, φ_t(ξ)) dt` by the composite trapezoidal
/// rule on `n_time` intervals. `boundary` lists `(ξ, n)` pairs.
pub fn academic_surface_derivative(
    f: &dyn ScalarField,
    boundary: &[(f64, f64)],
    motion: &dyn Motion<1>,
    theta: &dyn Fn(f64) -> f64,
    n_time: usize,
) -> f64 {
    let n_time = n_time.max(1);
    let dt = motion.period() / n_time as f64;
    boundary
        .iter()
        .map(|&(xi, normal)| {
            let density = |t: f64| motion.grad1(t, xi).abs() * f.value(t, motion.forward1(t, xi));
            let inner: f64 = (1..n_time).map(|k| density(k as f64 * dt)).sum();
            let v = dt * (0.5 * (density(0.0) + density(motion.period())) + inner);
            v * theta(xi) * normal
        })
        .sum()
}

/// A quadrature of the reference design `Ω` (points in reference
/// coordinates, weights summing to `|Ω|`).
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceQuadrature<const D: usize> {
    pub points: Vec<Point<D>>,
    pub weights: Vec<f64>,
}

/// Dimension-generic volume form, integrated on `(0, T) × Ω` in reference
/// coordinates with `n_time` Gauss points in time:
/// `∫_0^T ∫_Ω |det ∇φ_t| (m′(0)(θ) f + f₁(θ))(t, φ_t(ξ)) dξ dt`.
///
/// `f` returns the value and spatial gradient at `(t, x)`; `theta` returns
/// `θ(ξ)` and `∇θ(ξ)`.
pub fn academic_volume_derivative_reference<const D: usize>(
    f: &dyn Fn(f64, &Point<D>) -> (f64, Point<D>),
    motion: &dyn Motion<D>,
    theta: &dyn Fn(&Point<D>) -> (Point<D>, Mat<D>),
    omega: &ReferenceQuadrature<D>,
    n_time: usize,
) -> Result<f64, ShapeError> {
    let period = motion.period();
    let (tx, tw) = gauss_legendre(n_time.max(1));
    let mut total = 0.0;
    for (s, wt) in tx.iter().zip(&tw) {
        let t = s * period;
        for (xi, w) in omega.points.iter().zip(&omega.weights) {
            let x = motion.forward(t, xi);
            let kp = KernelPoint::new(motion, t, &x)?;
            let (th, dth) = theta(xi);
            let (fv, gf) = f(t, &x);
            let integrand = kp.m_prime().value(&th, &dth) * fv + kp.scalar_derivative(&gf).value(&th, &dth);
            total += wt * period * w * determinant(&kp.g).abs() * integrand;
        }
    }
    Ok(total)
}
