//! Volume form of the derivative of `J(Ω) = ∫_Q j(t, x, u_Ω)` constrained by
//! the (possibly nonlinear) state equation.

use crate::fem::{dot3, Assembler, ElementData, Field};
use crate::functions::Integrand;
use crate::kernel::{KernelPoint, PullbackLinearForm};
use crate::mesh::{vertical_line_elements, SpatialField};
use crate::motion::{Motion1D, Point};

use super::{DensityAccumulator, DensityRule, DerivativeDensities, ShapeError};

/// Which deformation field the direct (term-by-term) evaluation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectModel {
    /// The P1 interpolant of the transported velocity `V = ∇φ_t θ` on the
    /// space-time mesh: the derivative of the discrete objective.
    Discrete,
    /// The exact kernels at the quadrature points.
    Kernel,
}

/// Solution values entering the volume form at one point.
#[derive(Debug, Clone, Copy)]
struct PointState {
    sigma: f64,
    /// `ν(|∂_x u|)` and `ν′(|∂_x u|)/|∂_x u|`.
    nu: f64,
    dnu_over_s: f64,
    ut: f64,
    ux: f64,
    px: f64,
    p: f64,
    v: f64,
    f: f64,
    j: f64,
    jx: f64,
}

impl PointState {
    fn new(el: &ElementData, uv: &[f64; 3], pv: &[f64; 3], lambda: &[f64; 3], t: f64, x: f64, v: f64, f: f64, jf: &dyn Integrand) -> Self {
        let [ut, ux] = el.geo.gradient(uv);
        let [_, px] = el.geo.gradient(pv);
        let (nu, dnu_over_s) = el.nu.linearized(ux.abs());
        let u = dot3(lambda, uv);
        Self {
            sigma: el.sigma,
            nu,
            dnu_over_s,
            ut,
            ux,
            px,
            p: dot3(lambda, pv),
            v,
            f,
            j: jf.value(t, x, u),
            jx: jf.dx(t, x, u),
        }
    }
}

/// Kernel values at one point, either as linear forms or contracted with a
/// given `θ`. Generic so that both evaluation paths share nothing but the
/// algebra of the formula.
trait KernelValues: Copy {
    fn add(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
}

impl KernelValues for PullbackLinearForm<1> {
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl KernelValues for f64 {
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

/// The kernels `m′, F′_xx, b′, A′, v₁, f₁` and the transported velocity.
#[derive(Clone, Copy)]
struct Kernels<K> {
    m: K,
    fxx: K,
    b: K,
    a: K,
    v1: K,
    f1: K,
    transported: K,
}

impl Kernels<PullbackLinearForm<1>> {
    fn forms(kp: &KernelPoint<1>, vx: f64, fx: f64) -> Self {
        Self {
            m: kp.m_prime(),
            fxx: kp.fxx_prime()[0][0],
            b: kp.b_prime()[0],
            a: kp.a_prime()[0][0],
            v1: kp.vector_derivative(&nalgebra::Matrix1::new(vx))[0],
            f1: kp.scalar_derivative(&Point::<1>::new(fx)),
            transported: kp.transported()[0],
        }
    }
}

/// Integrand of the nonlinear volume form:
///
/// `m′ j + σ (m′ du/dt − F′_xx v u_x + v₁ u_x + b′ u_x) p
///  + (ν A′ − (ν′/|u_x|) F′_xx u_x²) u_x p_x − (m′ f + f₁) p + j_x V`,
///
/// with `du/dt = u_t + v u_x`. The last term accounts for integrands that
/// depend explicitly on `x`.
fn volume_integrand<K: KernelValues>(k: &Kernels<K>, s: &PointState) -> K {
    let dudt = s.ut + s.v * s.ux;
    let objective = k.m.scale(s.j);
    let transport = k
        .m
        .scale(dudt)
        .add(k.fxx.scale(-s.v * s.ux))
        .add(k.v1.scale(s.ux))
        .add(k.b.scale(s.ux))
        .scale(s.sigma * s.p);
    let diffusion = k
        .a
        .scale(s.nu)
        .add(k.fxx.scale(-s.dnu_over_s * s.ux * s.ux))
        .scale(s.ux * s.px);
    let source = k.m.scale(s.f).add(k.f1).scale(-s.p);
    let explicit = k.transported.scale(s.jx);
    objective.add(transport).add(diffusion).add(source).add(explicit)
}

fn check(asm: &Assembler<'_>, field: &Field) -> Result<(), ShapeError> {
    if field.len() != asm.dofs.n_vertices() {
        return Err(ShapeError::Dimension { expected: asm.dofs.n_vertices(), got: field.len() });
    }
    Ok(())
}

/// `∂J_h/∂X_a` for the three vertices of one element: the coefficient of
/// the vertex velocity `V_a` in `∂_X J·V + pᵀ ∂_X R·V`.
fn element_sensitivity(el: &ElementData, u: &Field, p: &Field, j: &dyn Integrand) -> [f64; 3] {
    let (uv, pv) = (el.gather(u), el.gather(p));
    let [ut, ux] = el.geo.gradient(&uv);
    let [_, px] = el.geo.gradient(&pv);
    let k = el.nu.tangent(ux.abs());
    let mut along_x = -el.geo.area * k * ux * px;
    let mut along_t = 0.0;
    let mut point = [0.0; 3];
    for q in &el.quad {
        let (uq, pq) = (dot3(&q.lambda, &uv), dot3(&q.lambda, &pv));
        along_x += q.weight * (j.value(q.t, q.x, uq) + el.sigma * ut * pq - q.f * pq);
        along_t -= q.weight * el.sigma * ux * pq;
        let c = q.weight * (j.dx(q.t, q.x, uq) + pq * (el.sigma * q.vx * ux - q.fx));
        for a in 0..3 {
            point[a] += c * q.lambda[a];
        }
    }
    std::array::from_fn(|a| el.geo.grad[a][1] * along_x + el.geo.grad[a][0] * along_t + point[a])
}

/// Sensitivity of the discrete objective to every vertex abscissa, with the
/// state constraint eliminated by the adjoint `p`:
/// `dJ_h = Σ_v s_v δx_v`.
pub fn vertex_sensitivities(
    asm: &Assembler<'_>,
    u: &Field,
    p: &Field,
    j: &dyn Integrand,
) -> Result<Vec<f64>, ShapeError> {
    check(asm, u)?;
    check(asm, p)?;
    let mut s = vec![0.0; u.len()];
    for el in &asm.elements {
        let local = element_sensitivity(el, u, p, j);
        for a in 0..3 {
            s[el.vertices[a]] += local[a];
        }
    }
    Ok(s)
}

/// Nodal covector `c_i = Σ_{v over node i} ∇φ_{t_v}(ξ_i) s_v`, so that
/// `J′(Ω)(θ) = Σ_i c_i θ_i` exactly for the discrete problem.
pub fn nodal_shape_gradient(
    asm: &Assembler<'_>,
    u: &Field,
    p: &Field,
    j: &dyn Integrand,
) -> Result<Vec<f64>, ShapeError> {
    let s = vertex_sensitivities(asm, u, p, j)?;
    let mesh = asm.mesh();
    let mut c = vec![0.0; mesh.n_x + 1];
    for (v, r) in mesh.reference.iter().enumerate() {
        c[v % (mesh.n_x + 1)] += asm.problem.motion.grad1(r[0], r[1]) * s[v];
    }
    Ok(c)
}

/// Densities `(g0, g1)` of the volume form for the state `u` and the adjoint
/// `p` of the objective `j`.
pub fn pde_volume_densities(
    asm: &Assembler<'_>,
    u: &Field,
    p: &Field,
    j: &dyn Integrand,
    rule: DensityRule,
) -> Result<DerivativeDensities, ShapeError> {
    check(asm, u)?;
    check(asm, p)?;
    let mesh = asm.mesh();
    let spatial = &mesh.spatial;
    let motion = asm.problem.motion;
    let mut acc = DensityAccumulator::new(spatial.n_elements());
    match rule {
        DensityRule::Exact => {
            for (id, el) in asm.elements.iter().enumerate() {
                let column = mesh.elements[id].column;
                let local = element_sensitivity(el, u, p, j);
                for a in 0..3 {
                    let r = mesh.reference[el.vertices[a]];
                    let node = el.vertices[a] % (mesh.n_x + 1);
                    acc.add_node(column, node, motion.grad1(r[0], r[1]) * local[a]);
                }
            }
            Ok(acc.finish(spatial, "pde", rule, "vertex sensitivities"))
        }
        DensityRule::KernelQuadrature => {
            for (id, el) in asm.elements.iter().enumerate() {
                let column = mesh.elements[id].column;
                let (uv, pv) = (el.gather(u), el.gather(p));
                for q in &el.quad {
                    let kp = KernelPoint::new(motion, q.t, &Point::<1>::new(q.x))?;
                    let state = PointState::new(el, &uv, &pv, &q.lambda, q.t, q.x, q.v, q.f, j);
                    let form = volume_integrand(&Kernels::forms(&kp, q.vx, q.fx), &state) * q.weight;
                    acc.add_form(spatial, column, kp.y[0], form.a[0], form.b[(0, 0)]);
                }
            }
            Ok(acc.finish(spatial, "pde", rule, format!("{}-point element rule", asm.elements.first().map_or(0, |e| e.quad.len()))))
        }
        DensityRule::CentroidTrajectory => {
            let mut out = DerivativeDensities::zeros(spatial.n_elements(), "pde", rule);
            out.quadrature = "composite trapezoid along centroid trajectories".into();
            let source = asm.problem.source;
            for e in 0..spatial.n_elements() {
                let xi = spatial.centroid(e);
                let (mut g0, mut g1) = (0.0, 0.0);
                for seg in vertical_line_elements(mesh, motion, xi)? {
                    let el = &asm.elements[seg.element];
                    let (uv, pv) = (el.gather(u), el.gather(p));
                    let half = 0.5 * (seg.t1 - seg.t0);
                    for t in [seg.t0, seg.t1] {
                        let x = motion.forward1(t, xi);
                        let g = motion.grad1(t, xi);
                        let v = motion.dt1(t, xi);
                        let vx = motion.dt_grad1(t, xi) / g;
                        let (f, fx) = (source.value(t, x), source.grad_x(t, x));
                        let lambda = el.geo.barycentric([t, x]);
                        let kp = KernelPoint::new(motion, t, &Point::<1>::new(x))?;
                        let state = PointState::new(el, &uv, &pv, &lambda, t, x, v, f, j);
                        let form = volume_integrand(&Kernels::forms(&kp, vx, fx), &state);
                        g0 += half * g.abs() * form.a[0];
                        g1 += half * g.abs() * form.b[(0, 0)];
                    }
                }
                out.g0[e] = g0;
                out.g1[e] = g1;
            }
            Ok(out)
        }
    }
}

/// `J′(Ω)(θ)` evaluated term by term for one deformation, without forming
/// densities.
pub fn pde_volume_derivative_direct(
    asm: &Assembler<'_>,
    u: &Field,
    p: &Field,
    j: &dyn Integrand,
    theta: &SpatialField,
    model: DirectModel,
) -> Result<f64, ShapeError> {
    check(asm, u)?;
    check(asm, p)?;
    let mesh = asm.mesh();
    let spatial = &mesh.spatial;
    if theta.values.len() != spatial.n_nodes() {
        return Err(ShapeError::Dimension { expected: spatial.n_nodes(), got: theta.values.len() });
    }
    let motion = asm.problem.motion;
    let mut total = 0.0;
    match model {
        DirectModel::Discrete => {
            let velocity = crate::fem::transported_velocity(mesh, motion, theta);
            for el in &asm.elements {
                let (uv, pv) = (el.gather(u), el.gather(p));
                let vel = el.vertices.map(|v| velocity[v]);
                let [vt, vx_] = el.geo.gradient(&vel);
                for q in &el.quad {
                    let vq = dot3(&q.lambda, &vel);
                    let kernels = Kernels {
                        m: vx_,
                        fxx: vx_,
                        b: -vt,
                        a: vx_ - 2.0 * vx_,
                        v1: q.vx * vq,
                        f1: q.fx * vq,
                        transported: vq,
                    };
                    let state = PointState::new(el, &uv, &pv, &q.lambda, q.t, q.x, q.v, q.f, j);
                    total += q.weight * volume_integrand(&kernels, &state);
                }
            }
        }
        DirectModel::Kernel => {
            for (id, el) in asm.elements.iter().enumerate() {
                let column = mesh.elements[id].column;
                let (uv, pv) = (el.gather(u), el.gather(p));
                for q in &el.quad {
                    let kp = KernelPoint::new(motion, q.t, &Point::<1>::new(q.x))?;
                    let y = kp.y[0];
                    let h = spatial.length(column);
                    let s = ((y - spatial.nodes[column]) / h).clamp(0.0, 1.0);
                    let (ta, tb) = (theta.values[column], theta.values[column + 1]);
                    let th = Point::<1>::new(ta * (1.0 - s) + tb * s);
                    let dth = nalgebra::Matrix1::new((tb - ta) / h);
                    let forms = Kernels::forms(&kp, q.vx, q.fx);
                    let kernels = Kernels {
                        m: forms.m.value(&th, &dth),
                        fxx: forms.fxx.value(&th, &dth),
                        b: forms.b.value(&th, &dth),
                        a: forms.a.value(&th, &dth),
                        v1: forms.v1.value(&th, &dth),
                        f1: forms.f1.value(&th, &dth),
                        transported: forms.transported.value(&th, &dth),
                    };
                    let state = PointState::new(el, &uv, &pv, &q.lambda, q.t, q.x, q.v, q.f, j);
                    total += q.weight * volume_integrand(&kernels, &state);
                }
            }
        }
    }
    Ok(total)
}
