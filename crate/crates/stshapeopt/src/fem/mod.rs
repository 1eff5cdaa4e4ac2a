//! Continuous P1 space-time finite elements for
//! `σ(∂_t u + v ∂_x u) − ∂_x(ν(|∂_x u|) ∂_x u) = f` on the moving domain,
//! with homogeneous Dirichlet data on `∂D` and the generalized periodicity
//! `u(0, ξ) = u(T, φ_T(ξ))`.
//!
//! Periodicity is imposed by aliasing each top vertex to its bottom partner;
//! test functions are aliased in the same way, so residual rows of paired
//! vertices are summed ("folded").

mod assembly;
pub mod identities;
mod linear;
mod solve;

use thiserror::Error;

use crate::materials::MaterialError;
use crate::mesh::{MeshError, SpaceTimeMesh};
use crate::motion::MotionError;

pub(crate) use assembly::dot3;
pub use assembly::{transported_velocity, Assembler, ElementData, QuadPoint, StateProblem};
pub use linear::{LinearSolution, LinearSystem, SparseMatrix, FAILED_RELATIVE_RESIDUAL, TARGET_RELATIVE_RESIDUAL};
pub use solve::{
    evaluate_objective, solve_adjoint, solve_continuous_adjoint, solve_state, solve_tangent, NewtonOptions, NewtonReport, StateSolution,
    STAGNATION_STEP,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FemError {
    #[error("non-finite value in element {element} while assembling the {what}")]
    Assembly { element: usize, what: &'static str },
    #[error("linear solver: {0}")]
    Solver(String),
    #[error("Newton did not converge after {iterations} iterations ({reason}); last residual {residual:e}")]
    NonConvergence { iterations: usize, residual: f64, reason: String },
    #[error("field has {got} values, mesh has {expected} vertices")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Reduction of vertex values to free degrees of freedom.
///
/// Lateral vertices are Dirichlet (no dof); each top vertex shares the dof of
/// its bottom partner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    map: Vec<Option<usize>>,
    /// One representative vertex per dof (a bottom or interior vertex).
    representative: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &SpaceTimeMesh) -> Self {
        let mut map = vec![None; mesh.n_vertices()];
        let mut representative = Vec::new();
        for v in 0..mesh.n_vertices() {
            let (j, i) = mesh.vertex_position(v);
            if i == 0 || i == mesh.n_x || j == mesh.n_t {
                continue;
            }
            map[v] = Some(representative.len());
            representative.push(v);
        }
        for &(bottom, top) in &mesh.periodic_pairs {
            map[top] = map[bottom];
        }
        Self { map, representative }
    }

    pub fn n_free(&self) -> usize {
        self.representative.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn dof(&self, vertex: usize) -> Option<usize> {
        self.map[vertex]
    }

    /// Sums vertex rows into their dofs, dropping Dirichlet rows.
    pub fn fold(&self, full: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_free()];
        for (v, val) in full.iter().enumerate() {
            if let Some(d) = self.map[v] {
                out[d] += val;
            }
        }
        out
    }

    /// Vertex values of a dof vector.
    pub fn expand(&self, reduced: &[f64]) -> Field {
        Field { values: self.map.iter().map(|d| d.map_or(0.0, |d| reduced[d])).collect() }
    }

    /// Dof values of a vertex field (read at representative vertices).
    pub fn restrict(&self, field: &Field) -> Vec<f64> {
        self.representative.iter().map(|&v| field.values[v]).collect()
    }

    /// True when Dirichlet values vanish and paired vertices agree.
    pub fn is_consistent(&self, field: &Field) -> bool {
        field.values.len() == self.map.len()
            && self.map.iter().zip(&field.values).all(|(d, &val)| match d {
                None => val == 0.0,
                Some(d) => val == field.values[self.representative[*d]],
            })
    }
}

/// P1 nodal values on all vertices of a space-time mesh, consistent with a
/// [`DofMap`] when produced by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub values: Vec<f64>,
}

impl Field {
    pub fn zeros(n: usize) -> Self {
        Self { values: vec![0.0; n] }
    }

    /// Nodal interpolant of `f(t, x)`.
    pub fn interpolate(mesh: &SpaceTimeMesh, f: impl Fn(f64, f64) -> f64) -> Self {
        Self { values: mesh.vertices.iter().map(|p| f(p[0], p[1])).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * s).collect() }
    }
}

/// Space-time errors of a P1 field against an exact solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    /// `‖u − u_h‖_{L²(Q)}`.
    pub l2: f64,
    /// `‖∂_x(u − u_h)‖_{L²(Q)}`, the `L²(0, T; H¹₀)` seminorm.
    pub h1: f64,
}

/// Errors of `u` against `exact(t, x) = (u, ∂_x u)`, with a six-point
/// (degree-4 exact) rule per element unless `rule` says otherwise.
pub fn error_norms(
    mesh: &SpaceTimeMesh,
    u: &Field,
    exact: impl Fn(f64, f64) -> (f64, f64),
    rule: Option<&crate::quadrature::TriangleRule>,
) -> Result<ErrorNorms, FemError> {
    if u.len() != mesh.n_vertices() {
        return Err(FemError::Dimension { expected: mesh.n_vertices(), got: u.len() });
    }
    let default = crate::quadrature::TriangleRule::collapsed_gauss(3);
    let rule = rule.unwrap_or(&default);
    let (mut l2, mut h1) = (0.0, 0.0);
    for (e, el) in mesh.elements.iter().enumerate() {
        let geo = mesh.geometry(e);
        let vals = el.vertices.map(|v| u.values[v]);
        let ux = geo.gradient(&vals)[1];
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let [t, x] = geo.point(l);
            let (ue, uxe) = exact(t, x);
            let uh = dot3(l, &vals);
            l2 += w * geo.area * (ue - uh).powi(2);
            h1 += w * geo.area * (uxe - ux).powi(2);
        }
    }
    Ok(ErrorNorms { l2: l2.sqrt(), h1: h1.sqrt() })
}
