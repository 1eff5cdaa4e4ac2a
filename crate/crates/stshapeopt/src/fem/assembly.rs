use crate::functions::{Integrand, ScalarField};
use crate::materials::{PhaseLayout, ReluctivityLaw};
use crate::mesh::{ElementGeometry, SpaceTimeMesh, SpatialField};
use crate::motion::{Motion, Motion1D};
use crate::quadrature::TriangleRule;

use super::{DofMap, FemError, Field, SparseMatrix};

/// Everything that defines the state equation on one mesh.
#[derive(Clone, Copy)]
pub struct StateProblem<'a> {
    pub mesh: &'a SpaceTimeMesh,
    pub layout: &'a PhaseLayout,
    pub motion: &'a dyn Motion<1>,
    pub source: &'a dyn ScalarField,
}

/// Data cached at one quadrature point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub lambda: [f64; 3],
    /// Rule weight times element area.
    pub weight: f64,
    pub t: f64,
    pub x: f64,
    /// Motion velocity `v(t, x)` and `∂_x v`.
    pub v: f64,
    pub vx: f64,
    /// Source `f(t, x)` and `∂_x f`.
    pub f: f64,
    pub fx: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementData {
    pub geo: ElementGeometry,
    pub vertices: [usize; 3],
    pub sigma: f64,
    pub nu: ReluctivityLaw,
    pub quad: Vec<QuadPoint>,
}

impl ElementData {
    #[inline]
    pub fn gather(&self, field: &Field) -> [f64; 3] {
        self.vertices.map(|v| field.values[v])
    }
}

/// Element-level cache of geometry, coefficients and source values. Build
/// one per mesh; all forms of the state, adjoint and tangent problems are
/// assembled from it.
pub struct Assembler<'a> {
    pub problem: StateProblem<'a>,
    pub dofs: DofMap,
    pub elements: Vec<ElementData>,
}

impl<'a> Assembler<'a> {
    /// Uses the interior three-point rule.
    pub fn new(problem: StateProblem<'a>) -> Result<Self, FemError> {
        Self::with_rule(problem, &TriangleRule::three_point())
    }

    pub fn with_rule(problem: StateProblem<'a>, rule: &TriangleRule) -> Result<Self, FemError> {
        let StateProblem { mesh, layout, motion, source } = problem;
        layout.validate(mesh.elements.iter().map(|e| e.phase))?;
        let mut elements = Vec::with_capacity(mesh.n_elements());
        for (id, el) in mesh.elements.iter().enumerate() {
            let geo = mesh.geometry(id);
            let mat = layout.get(el.phase)?;
            let mut quad = Vec::with_capacity(rule.len());
            for (lambda, w) in rule.points.iter().zip(&rule.weights) {
                let [t, x] = geo.point(lambda);
                let y = motion.inverse1(t, x)?;
                let g = motion.grad1(t, y);
                let v = motion.dt1(t, y);
                let vx = motion.dt_grad1(t, y) / g;
                let (f, fx) = (source.value(t, x), source.grad_x(t, x));
                if ![v, vx, f, fx].iter().all(|q| q.is_finite()) {
                    return Err(FemError::Assembly { element: id, what: "coefficients" });
                }
                quad.push(QuadPoint { lambda: *lambda, weight: w * geo.area, t, x, v, vx, f, fx });
            }
            elements.push(ElementData { geo, vertices: el.vertices, sigma: mat.sigma, nu: mat.nu, quad });
        }
        Ok(Self { problem, dofs: DofMap::new(mesh), elements })
    }

    pub fn mesh(&self) -> &SpaceTimeMesh {
        self.problem.mesh
    }

    pub fn is_linear(&self) -> bool {
        self.elements.iter().all(|e| e.nu.is_linear())
    }

    fn check_len(&self, field: &Field) -> Result<(), FemError> {
        if field.len() != self.dofs.n_vertices() {
            return Err(FemError::Dimension { expected: self.dofs.n_vertices(), got: field.len() });
        }
        Ok(())
    }

    /// Weak residual tested against every vertex basis function:
    /// `R_a = ∫ [σ(∂_t u + v ∂_x u) − f] λ_a + ν(|∂_x u|) ∂_x u ∂_x λ_a`.
    pub fn residual_full(&self, u: &Field) -> Result<Vec<f64>, FemError> {
        self.check_len(u)?;
        let mut r = vec![0.0; u.len()];
        for (id, el) in self.elements.iter().enumerate() {
            let [ut, ux] = el.geo.gradient(&el.gather(u));
            let (nu, _) = el.nu.evaluate_unchecked(ux.abs());
            let flux = el.geo.area * nu * ux;
            let mut local = [0.0; 3];
            for q in &el.quad {
                let s = q.weight * (el.sigma * (ut + q.v * ux) - q.f);
                for a in 0..3 {
                    local[a] += s * q.lambda[a];
                }
            }
            for a in 0..3 {
                local[a] += flux * el.geo.grad[a][1];
                if !local[a].is_finite() {
                    return Err(FemError::Assembly { element: id, what: "state residual" });
                }
                r[el.vertices[a]] += local[a];
            }
        }
        Ok(r)
    }

    /// Folded residual over the free dofs.
    pub fn residual(&self, u: &Field) -> Result<Vec<f64>, FemError> {
        Ok(self.dofs.fold(&self.residual_full(u)?))
    }

    /// Gâteaux derivative of the folded residual with respect to the dofs.
    pub fn jacobian(&self, u: &Field) -> Result<SparseMatrix, FemError> {
        self.check_len(u)?;
        let local = self.jacobian_local(u);
        self.assemble_matrix(local, "jacobian")
    }

    /// The adjoint form assembled independently from its continuous
    /// statement, `∫ −σ (dp/dt) w − σ (div v) p w + ν_lin ∂_x p ∂_x w`, with
    /// `dp/dt = ∂_t p + v ∂_x p`. Row `a` is the test function `w = λ_a`.
    ///
    /// On meshes whose top and bottom traces coincide (`φ_T = φ_0`) this
    /// equals the transposed Jacobian up to quadrature; in general the two
    /// differ by the time-boundary terms of the integration by parts.
    pub fn adjoint_operator(&self, u: &Field) -> Result<SparseMatrix, FemError> {
        self.check_len(u)?;
        self.assemble_matrix(|el| {
            let [_, ux] = el.geo.gradient(&el.gather(u));
            let k = el.nu.tangent(ux.abs());
            let mut m = [[0.0; 3]; 3];
            for q in &el.quad {
                for a in 0..3 {
                    for b in 0..3 {
                        let g = el.geo.grad[b];
                        let dpdt = g[0] + q.v * g[1];
                        m[a][b] -= q.weight * el.sigma * (dpdt + q.vx * q.lambda[b]) * q.lambda[a];
                    }
                }
            }
            for a in 0..3 {
                for b in 0..3 {
                    m[a][b] += el.geo.area * k * el.geo.grad[a][1] * el.geo.grad[b][1];
                }
            }
            m
        }, "adjoint operator")
    }

    /// Jacobian whose test functions are scaled vertex-wise by
    /// `row_weights` before folding; with weights `1/φ_T′(ξ)` on the top row
    /// its transpose is the adjoint with the periodicity
    /// `p(0, ξ) = φ_T′(ξ) p(T, φ_T(ξ))` of the continuous problem.
    pub fn jacobian_with_test_weights(&self, u: &Field, row_weights: &[f64]) -> Result<SparseMatrix, FemError> {
        self.check_len(u)?;
        if row_weights.len() != u.len() {
            return Err(FemError::Dimension { expected: u.len(), got: row_weights.len() });
        }
        let base = self.jacobian_local(u);
        self.assemble_weighted(&base, Some(row_weights), "weighted jacobian")
    }

    fn jacobian_local(&self, u: &Field) -> impl Fn(&ElementData) -> [[f64; 3]; 3] + '_ {
        let u = u.clone();
        move |el: &ElementData| {
            let [_, ux] = el.geo.gradient(&el.gather(&u));
            let k = el.nu.tangent(ux.abs());
            let mut m = [[0.0; 3]; 3];
            for q in &el.quad {
                for a in 0..3 {
                    for b in 0..3 {
                        let g = el.geo.grad[b];
                        m[a][b] += q.weight * el.sigma * (g[0] + q.v * g[1]) * q.lambda[a];
                    }
                }
            }
            for a in 0..3 {
                for b in 0..3 {
                    m[a][b] += el.geo.area * k * el.geo.grad[a][1] * el.geo.grad[b][1];
                }
            }
            m
        }
    }

    fn assemble_matrix(
        &self,
        local: impl Fn(&ElementData) -> [[f64; 3]; 3],
        what: &'static str,
    ) -> Result<SparseMatrix, FemError> {
        self.assemble_weighted(&local, None, what)
    }

    fn assemble_weighted(
        &self,
        local: &dyn Fn(&ElementData) -> [[f64; 3]; 3],
        row_weights: Option<&[f64]>,
        what: &'static str,
    ) -> Result<SparseMatrix, FemError> {
        let mut entries = Vec::with_capacity(9 * self.elements.len());
        for (id, el) in self.elements.iter().enumerate() {
            let m = local(el);
            for a in 0..3 {
                let Some(ra) = self.dofs.dof(el.vertices[a]) else { continue };
                let wa = row_weights.map_or(1.0, |w| w[el.vertices[a]]);
                for b in 0..3 {
                    let Some(cb) = self.dofs.dof(el.vertices[b]) else { continue };
                    if !m[a][b].is_finite() {
                        return Err(FemError::Assembly { element: id, what });
                    }
                    entries.push((ra, cb, wa * m[a][b]));
                }
            }
        }
        Ok(SparseMatrix::from_triplets(self.dofs.n_free(), entries))
    }

    /// `J = ∫_Q j(t, x, u)`.
    pub fn objective(&self, u: &Field, j: &dyn Integrand) -> Result<f64, FemError> {
        self.check_len(u)?;
        let mut total = 0.0;
        for el in &self.elements {
            let uv = el.gather(u);
            for q in &el.quad {
                total += q.weight * j.value(q.t, q.x, dot3(&q.lambda, &uv));
            }
        }
        Ok(total)
    }

    /// `∂J/∂u_a` for every vertex (unfolded).
    pub fn objective_gradient_full(&self, u: &Field, j: &dyn Integrand) -> Result<Vec<f64>, FemError> {
        self.check_len(u)?;
        let mut g = vec![0.0; u.len()];
        for el in &self.elements {
            let uv = el.gather(u);
            for q in &el.quad {
                let d = q.weight * j.du(q.t, q.x, dot3(&q.lambda, &uv));
                for a in 0..3 {
                    g[el.vertices[a]] += d * q.lambda[a];
                }
            }
        }
        Ok(g)
    }

    /// Directional derivative of the (unfolded) residual when the vertices
    /// move by `velocity` (one value per vertex) with the nodal values of `u`
    /// held fixed.
    pub fn shape_residual_derivative(&self, u: &Field, velocity: &[f64]) -> Result<Vec<f64>, FemError> {
        self.check_len(u)?;
        let mut dr = vec![0.0; u.len()];
        for el in &self.elements {
            let [ut, ux] = el.geo.gradient(&el.gather(u));
            let vel = el.vertices.map(|v| velocity[v]);
            let [dv_t, dv_x] = el.geo.gradient(&vel);
            let k = el.nu.tangent(ux.abs());
            for q in &el.quad {
                let vq = dot3(&q.lambda, &vel);
                let s = q.weight
                    * (el.sigma * (dv_x * ut - dv_t * ux + q.vx * vq * ux) - dv_x * q.f - q.fx * vq);
                for a in 0..3 {
                    dr[el.vertices[a]] += s * q.lambda[a];
                }
            }
            let flux = -el.geo.area * k * dv_x * ux;
            for a in 0..3 {
                dr[el.vertices[a]] += flux * el.geo.grad[a][1];
            }
        }
        Ok(dr)
    }

    /// Partial derivative of `J` when the vertices move by `velocity`.
    pub fn shape_objective_derivative(
        &self,
        u: &Field,
        j: &dyn Integrand,
        velocity: &[f64],
    ) -> Result<f64, FemError> {
        self.check_len(u)?;
        let mut total = 0.0;
        for el in &self.elements {
            let uv = el.gather(u);
            let vel = el.vertices.map(|v| velocity[v]);
            let [_, dv_x] = el.geo.gradient(&vel);
            for q in &el.quad {
                let uq = dot3(&q.lambda, &uv);
                total += q.weight * (dv_x * j.value(q.t, q.x, uq) + j.dx(q.t, q.x, uq) * dot3(&q.lambda, &vel));
            }
        }
        Ok(total)
    }
}

#[inline]
pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Vertex velocity `V(t_j, x) = ∇φ_{t_j}(ξ_i) θ(ξ_i)` induced by the design
/// deformation `θ`. It is the derivative of the vertex positions of
/// `deform_mesh(mesh, θ, τ)` at `τ = 0`.
pub fn transported_velocity(mesh: &SpaceTimeMesh, motion: &dyn Motion<1>, theta: &SpatialField) -> Vec<f64> {
    mesh.reference
        .iter()
        .enumerate()
        .map(|(v, r)| {
            let i = v % (mesh.n_x + 1);
            motion.grad1(r[0], r[1]) * theta.values[i]
        })
        .collect()
}
