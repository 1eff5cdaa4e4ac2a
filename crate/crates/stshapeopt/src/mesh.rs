//! Space-time triangulations of `Q = {(t, x) : x ∈ φ_t(D)}` for a spatial
//! interval `D = (0, 1)`.
//!
//! The mesh is built on the reference rectangle `[0, T] × [0, 1]` in
//! `(t, ξ)` and pushed forward vertex-wise by `(t, ξ) ↦ (t, φ_t(ξ))`. Phase
//! interfaces are reference grid lines, so every element lies in a single
//! phase at all times. Vertex `(j, i)` (time level `j`, spatial node `i`) has
//! index `j·(n_x + 1) + i`; the top row is paired index-wise with the bottom.

use thiserror::Error;

use crate::materials::PhaseId;
use crate::motion::{Motion, Motion1D, MotionError};

/// Phase label of the design `Ω` in the generated example meshes.
pub const INNER_PHASE: PhaseId = 1;
/// Phase label of `D \ Ω` in the generated example meshes.
pub const OUTER_PHASE: PhaseId = 2;

/// Relative nudge applied to trajectory abscissae lying on mesh lines.
const TRAJECTORY_NUDGE: f64 = 1e-12;
/// Tolerated gap when checking that trajectory intervals cover `[0, T]`.
const COVERAGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("element {element} inverted (signed area {area:e})")]
    InvertedElement { element: usize, area: f64 },
    #[error("deformation moves the fixed boundary node {node} by {shift:e}")]
    BoundaryMoved { node: usize, shift: f64 },
    #[error(transparent)]
    Motion(#[from] MotionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTag {
    /// `x ∈ ∂D`, homogeneous Dirichlet.
    Lateral,
    /// `t = 0`.
    Bottom,
    /// `t = T`.
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryFacet {
    pub vertices: [usize; 2],
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Element {
    /// Counter-clockwise in the `(t, x)` plane.
    pub vertices: [usize; 3],
    pub phase: PhaseId,
    /// Time slab `[t_j, t_{j+1}]` containing the element.
    pub slab: usize,
    /// Spatial element (column) `[ξ_i, ξ_{i+1}]` containing the element.
    pub column: usize,
}

/// Affine data of one space-time triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    /// Vertex coordinates `(t, x)`.
    pub coords: [[f64; 2]; 3],
    pub area: f64,
    /// `(∂λ_a/∂t, ∂λ_a/∂x)` for each barycentric coordinate.
    pub grad: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn new(coords: [[f64; 2]; 3]) -> Self {
        let [p0, p1, p2] = coords;
        let (dt1, dx1) = (p1[0] - p0[0], p1[1] - p0[1]);
        let (dt2, dx2) = (p2[0] - p0[0], p2[1] - p0[1]);
        let det = dt1 * dx2 - dt2 * dx1;
        // λ1 = ( dx2 (t − t0) − dt2 (x − x0)) / det, λ2 = (−dx1 (t − t0) + dt1 (x − x0)) / det
        let g1 = [dx2 / det, -dt2 / det];
        let g2 = [-dx1 / det, dt1 / det];
        let g0 = [-g1[0] - g2[0], -g1[1] - g2[1]];
        Self { coords, area: 0.5 * det, grad: [g0, g1, g2] }
    }

    /// Physical point with barycentric coordinates `l`.
    pub fn point(&self, l: &[f64; 3]) -> [f64; 2] {
        let c = &self.coords;
        [
            l[0] * c[0][0] + l[1] * c[1][0] + l[2] * c[2][0],
            l[0] * c[0][1] + l[1] * c[1][1] + l[2] * c[2][1],
        ]
    }

    /// Barycentric coordinates of a physical point.
    pub fn barycentric(&self, p: [f64; 2]) -> [f64; 3] {
        let c0 = self.coords[0];
        let (dt, dx) = (p[0] - c0[0], p[1] - c0[1]);
        let l1 = self.grad[1][0] * dt + self.grad[1][1] * dx;
        let l2 = self.grad[2][0] * dt + self.grad[2][1] * dx;
        [1.0 - l1 - l2, l1, l2]
    }

    /// `(∂_t, ∂_x)` of the P1 function with vertex values `v`.
    pub fn gradient(&self, v: &[f64; 3]) -> [f64; 2] {
        let g = &self.grad;
        [
            v[0] * g[0][0] + v[1] * g[1][0] + v[2] * g[2][0],
            v[0] * g[0][1] + v[1] * g[1][1] + v[2] * g[2][1],
        ]
    }
}

/// The bottom trace of a space-time mesh, in reference coordinates `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialMesh {
    /// Increasing node abscissae; the first and last are the fixed boundary.
    pub nodes: Vec<f64>,
    /// Phase of each segment `[nodes[e], nodes[e + 1]]`.
    pub phases: Vec<PhaseId>,
}

/// Nodal (P1) values on a [`SpatialMesh`], e.g. a deformation `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialField {
    pub values: Vec<f64>,
}

impl SpatialField {
    pub fn zeros(n: usize) -> Self {
        Self { values: vec![0.0; n] }
    }

    /// Interpolates `f` at the nodes of `mesh`.
    pub fn from_fn(mesh: &SpatialMesh, f: impl Fn(f64) -> f64) -> Self {
        Self { values: mesh.nodes.iter().map(|&x| f(x)).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// An interface point of the spatial mesh, where the phase changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfacePoint {
    pub node: usize,
    pub xi: f64,
    pub left_phase: PhaseId,
    pub right_phase: PhaseId,
}

impl SpatialMesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.phases.len()
    }

    pub fn length(&self, e: usize) -> f64 {
        self.nodes[e + 1] - self.nodes[e]
    }

    pub fn centroid(&self, e: usize) -> f64 {
        0.5 * (self.nodes[e] + self.nodes[e + 1])
    }

    /// Element containing `xi` (the right one at interior nodes).
    pub fn locate(&self, xi: f64) -> Option<usize> {
        let n = self.nodes.len();
        if xi < self.nodes[0] || xi > self.nodes[n - 1] {
            return None;
        }
        let k = self.nodes.partition_point(|&x| x <= xi);
        Some(k.saturating_sub(1).min(self.n_elements() - 1))
    }

    /// Value and slope of the P1 function `values` at `xi`.
    pub fn interpolate(&self, values: &[f64], xi: f64) -> Option<(f64, f64)> {
        let e = self.locate(xi)?;
        let h = self.length(e);
        let s = (xi - self.nodes[e]) / h;
        let slope = (values[e + 1] - values[e]) / h;
        Some((values[e] * (1.0 - s) + values[e + 1] * s, slope))
    }

    pub fn is_boundary_node(&self, i: usize) -> bool {
        i == 0 || i + 1 == self.nodes.len()
    }

    pub fn interfaces(&self) -> Vec<InterfacePoint> {
        (1..self.n_elements())
            .filter(|&e| self.phases[e - 1] != self.phases[e])
            .map(|e| InterfacePoint {
                node: e,
                xi: self.nodes[e],
                left_phase: self.phases[e - 1],
                right_phase: self.phases[e],
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeMesh {
    pub n_x: usize,
    pub n_t: usize,
    pub period: f64,
    /// Time levels `t_j`.
    pub times: Vec<f64>,
    /// Physical coordinates `(t, x)`.
    pub vertices: Vec<[f64; 2]>,
    /// Reference coordinates `(t, ξ)` with `x = φ_t(ξ)`.
    pub reference: Vec<[f64; 2]>,
    pub elements: Vec<Element>,
    pub boundary: Vec<BoundaryFacet>,
    /// `(bottom, top)` vertex pairs.
    pub periodic_pairs: Vec<(usize, usize)>,
    pub spatial: SpatialMesh,
}

/// Input of [`generate_1d_mesh`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    pub n_x: usize,
    pub n_t: usize,
    /// Increasing interface abscissae in `(0, 1)`.
    pub interfaces: Vec<f64>,
    /// Phase per interval between interfaces; defaults to alternating
    /// `OUTER, INNER, OUTER, …`.
    pub phases: Option<Vec<PhaseId>>,
}

/// Union-jack mesh with the given interfaces and alternating phases.
pub fn generate_1d_example_mesh(
    n_x: usize,
    n_t: usize,
    interfaces: &[f64],
    motion: &dyn Motion<1>,
) -> Result<SpaceTimeMesh, MeshError> {
    generate_1d_mesh(
        &MeshSpec { n_x, n_t, interfaces: interfaces.to_vec(), phases: None },
        motion,
    )
}

pub fn generate_1d_mesh(spec: &MeshSpec, motion: &dyn Motion<1>) -> Result<SpaceTimeMesh, MeshError> {
    let MeshSpec { n_x, n_t, ref interfaces, ref phases } = *spec;
    if n_x < 4 || n_t < 2 {
        return Err(MeshError::Geometry(format!("need n_x >= 4 and n_t >= 2, got {n_x} x {n_t}")));
    }
    let period = motion.period();
    if !(period > 0.0 && period.is_finite()) {
        return Err(MeshError::Geometry(format!("period must be positive, got {period}")));
    }
    for w in interfaces.windows(2) {
        if w[1] <= w[0] {
            return Err(MeshError::Geometry("interfaces must be strictly increasing".into()));
        }
    }
    if interfaces.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
        return Err(MeshError::Geometry("interfaces must lie in (0, 1)".into()));
    }
    let interval_phases: Vec<PhaseId> = match phases {
        Some(p) if p.len() == interfaces.len() + 1 => p.clone(),
        Some(p) => {
            return Err(MeshError::Geometry(format!(
                "{} interfaces need {} phases, got {}",
                interfaces.len(),
                interfaces.len() + 1,
                p.len()
            )))
        }
        None => (0..=interfaces.len())
            .map(|k| if k % 2 == 0 { OUTER_PHASE } else { INNER_PHASE })
            .collect(),
    };

    // Uniform nodes, with the nearest node moved exactly onto each interface.
    let mut nodes: Vec<f64> = (0..=n_x).map(|i| i as f64 / n_x as f64).collect();
    let mut snapped = Vec::with_capacity(interfaces.len());
    for &a in interfaces {
        let i = (a * n_x as f64).round() as usize;
        if i == 0 || i == n_x || snapped.contains(&i) {
            return Err(MeshError::Geometry(format!(
                "interface {a} cannot be resolved with n_x = {n_x}"
            )));
        }
        nodes[i] = a;
        snapped.push(i);
    }
    let mut elem_phases = vec![interval_phases[0]; n_x];
    for (e, p) in elem_phases.iter_mut().enumerate() {
        let k = snapped.iter().filter(|&&i| i <= e).count();
        *p = interval_phases[k];
    }
    let spatial = SpatialMesh { nodes, phases: elem_phases };
    build(n_x, n_t, period, spatial, motion)
}

fn build(
    n_x: usize,
    n_t: usize,
    period: f64,
    spatial: SpatialMesh,
    motion: &dyn Motion<1>,
) -> Result<SpaceTimeMesh, MeshError> {
    let times: Vec<f64> = (0..=n_t).map(|j| period * j as f64 / n_t as f64).collect();
    let mut vertices = Vec::with_capacity((n_x + 1) * (n_t + 1));
    let mut reference = Vec::with_capacity(vertices.capacity());
    for &t in &times {
        for &xi in &spatial.nodes {
            vertices.push([t, motion.forward1(t, xi)]);
            reference.push([t, xi]);
        }
    }
    let vid = |j: usize, i: usize| j * (n_x + 1) + i;
    let mut elements = Vec::with_capacity(2 * n_x * n_t);
    for j in 0..n_t {
        for i in 0..n_x {
            let (a0, a1, a2, a3) = (vid(j, i), vid(j, i + 1), vid(j + 1, i + 1), vid(j + 1, i));
            let tris = if (i + j) % 2 == 0 { [[a0, a3, a2], [a0, a2, a1]] } else { [[a0, a3, a1], [a1, a3, a2]] };
            for v in tris {
                elements.push(Element { vertices: v, phase: spatial.phases[i], slab: j, column: i });
            }
        }
    }
    let mut boundary = Vec::new();
    for j in 0..n_t {
        boundary.push(BoundaryFacet { vertices: [vid(j, 0), vid(j + 1, 0)], tag: BoundaryTag::Lateral });
        boundary.push(BoundaryFacet { vertices: [vid(j, n_x), vid(j + 1, n_x)], tag: BoundaryTag::Lateral });
    }
    for i in 0..n_x {
        boundary.push(BoundaryFacet { vertices: [vid(0, i), vid(0, i + 1)], tag: BoundaryTag::Bottom });
        boundary.push(BoundaryFacet { vertices: [vid(n_t, i), vid(n_t, i + 1)], tag: BoundaryTag::Top });
    }
    let periodic_pairs = (0..=n_x).map(|i| (vid(0, i), vid(n_t, i))).collect();
    let mesh = SpaceTimeMesh { n_x, n_t, period, times, vertices, reference, elements, boundary, periodic_pairs, spatial };
    mesh.check_orientation()?;
    Ok(mesh)
}

impl SpaceTimeMesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn vertex_index(&self, level: usize, node: usize) -> usize {
        level * (self.n_x + 1) + node
    }

    /// `(time level, spatial node)` of a vertex.
    #[inline]
    pub fn vertex_position(&self, v: usize) -> (usize, usize) {
        (v / (self.n_x + 1), v % (self.n_x + 1))
    }

    pub fn geometry(&self, e: usize) -> ElementGeometry {
        ElementGeometry::new(self.elements[e].vertices.map(|v| self.vertices[v]))
    }

    pub fn signed_area(&self, e: usize) -> f64 {
        self.geometry(e).area
    }

    /// Elements of time slab `j`, in column order.
    pub fn slab_elements(&self, j: usize) -> std::ops::Range<usize> {
        2 * self.n_x * j..2 * self.n_x * (j + 1)
    }

    /// The two elements of column `i` in slab `j`.
    pub fn cell_elements(&self, j: usize, i: usize) -> [usize; 2] {
        let k = 2 * (j * self.n_x + i);
        [k, k + 1]
    }

    /// Total space-time measure.
    pub fn volume(&self) -> f64 {
        (0..self.n_elements()).map(|e| self.signed_area(e)).sum()
    }

    fn check_orientation(&self) -> Result<(), MeshError> {
        for e in 0..self.n_elements() {
            let area = self.signed_area(e);
            if !(area > 0.0) {
                return Err(MeshError::InvertedElement { element: e, area });
            }
        }
        Ok(())
    }

    /// Verifies orientation, interface conformity, the reference map and the
    /// generalized periodic pairing `x_top = φ_T(ξ_bottom)`.
    pub fn check_invariants(&self, motion: &dyn Motion<1>) -> Result<(), MeshError> {
        self.check_orientation()?;
        for (e, el) in self.elements.iter().enumerate() {
            if el.phase != self.spatial.phases[el.column] {
                return Err(MeshError::Geometry(format!("element {e} has a phase different from its column")));
            }
        }
        for (v, (p, r)) in self.vertices.iter().zip(&self.reference).enumerate() {
            let x = motion.forward1(r[0], r[1]);
            if p[0] != r[0] || (p[1] - x).abs() > 1e-12 * x.abs().max(1.0) {
                return Err(MeshError::Geometry(format!("vertex {v} is off its reference trajectory")));
            }
        }
        let t_top = self.period;
        for &(b, top) in &self.periodic_pairs {
            let (pb, pt) = (self.vertices[b], self.vertices[top]);
            let xi = self.reference[b][1];
            let expected = motion.forward1(t_top, xi);
            if pb[0] != 0.0 || (pt[0] - t_top).abs() > 1e-12 || (pt[1] - expected).abs() > 1e-12 * expected.abs().max(1.0) {
                return Err(MeshError::Geometry(format!("periodic pair ({b}, {top}) is inconsistent")));
            }
        }
        Ok(())
    }

    /// Moves the reference nodes by `τθ` and pushes them forward again:
    /// vertices follow `Θ(t, x) = (t, φ_t((Id + τθ)(φ_t⁻¹ x)))`.
    pub fn deformed(&self, motion: &dyn Motion<1>, theta: &SpatialField, tau: f64) -> Result<Self, MeshError> {
        deform_mesh(self, motion, theta, tau)
    }
}

pub fn deform_mesh(
    mesh: &SpaceTimeMesh,
    motion: &dyn Motion<1>,
    theta: &SpatialField,
    tau: f64,
) -> Result<SpaceTimeMesh, MeshError> {
    let n = mesh.spatial.n_nodes();
    if theta.values.len() != n {
        return Err(MeshError::Geometry(format!("deformation has {} values for {} nodes", theta.values.len(), n)));
    }
    for i in [0, n - 1] {
        let shift = tau * theta.values[i];
        // Roundoff-sized values (e.g. sin(πξ) at ξ = 1) are pinned to zero.
        if shift.abs() > 1e-12 {
            return Err(MeshError::BoundaryMoved { node: i, shift });
        }
    }
    let mut nodes: Vec<f64> = mesh.spatial.nodes.iter().zip(&theta.values).map(|(x, t)| x + tau * t).collect();
    nodes[0] = mesh.spatial.nodes[0];
    nodes[n - 1] = mesh.spatial.nodes[n - 1];
    let mut out = mesh.clone();
    out.spatial.nodes = nodes;
    for (v, (p, r)) in out.vertices.iter_mut().zip(out.reference.iter_mut()).enumerate() {
        let xi = out.spatial.nodes[v % (mesh.n_x + 1)];
        r[1] = xi;
        p[1] = motion.forward1(r[0], xi);
    }
    out.check_orientation()?;
    Ok(out)
}

/// Portion of a trajectory inside one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySegment {
    pub element: usize,
    pub t0: f64,
    pub t1: f64,
}

/// Elements crossed by the trajectory `t ↦ (t, φ_t(ξ₀))`, ordered in time.
///
/// Within each slab the trajectory is replaced by the chord between its
/// positions at the slab's time levels — exact for motions affine in `t`
/// such as `y + t y²`, and consistent with the straight mesh edges otherwise.
pub fn vertical_line_elements(
    mesh: &SpaceTimeMesh,
    motion: &dyn Motion<1>,
    xi0: f64,
) -> Result<Vec<TrajectorySegment>, MeshError> {
    let nodes = &mesh.spatial.nodes;
    let (lo, hi) = (nodes[0], nodes[nodes.len() - 1]);
    let scale = (hi - lo).max(1.0);
    if xi0 < lo - COVERAGE_TOL * scale || xi0 > hi + COVERAGE_TOL * scale {
        return Err(MeshError::Geometry(format!("trajectory start {xi0} lies outside the design domain")));
    }
    let nudge = TRAJECTORY_NUDGE * scale;
    let xi = xi0.clamp(lo + nudge, hi - nudge);
    let column = mesh.spatial.locate(xi).expect("clamped abscissa lies in the mesh");
    let mut segments = Vec::with_capacity(2 * mesh.n_t);
    for j in 0..mesh.n_t {
        let (ta, tb) = (mesh.times[j], mesh.times[j + 1]);
        let a = [ta, motion.forward1(ta, xi)];
        let b = [tb, motion.forward1(tb, xi)];
        let mut local: Vec<(f64, f64, usize)> = Vec::with_capacity(2);
        // The chord stays between the chords of the column's boundary nodes;
        // the neighbouring columns are scanned as a safeguard.
        let first = column.saturating_sub(1);
        let last = (column + 1).min(mesh.n_x - 1);
        for c in first..=last {
            for e in mesh.cell_elements(j, c) {
                if let Some((s0, s1)) = clip_segment(&mesh.geometry(e), a, b) {
                    local.push((s0, s1, e));
                }
            }
        }
        local.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut cursor = 0.0;
        for (s0, s1, e) in local {
            if s1 <= cursor + 1e-14 {
                continue;
            }
            if s0 > cursor + COVERAGE_TOL {
                return Err(MeshError::Geometry(format!(
                    "trajectory from {xi0} leaves the mesh in slab {j} at parameter {cursor}"
                )));
            }
            segments.push(TrajectorySegment { element: e, t0: ta + (tb - ta) * cursor, t1: ta + (tb - ta) * s1.min(1.0) });
            cursor = s1.min(1.0);
        }
        if cursor < 1.0 - COVERAGE_TOL {
            return Err(MeshError::Geometry(format!("trajectory from {xi0} leaves the mesh in slab {j}")));
        }
        if let Some(last) = segments.last_mut() {
            last.t1 = tb;
        }
    }
    Ok(segments)
}

/// Parameter interval `[s0, s1] ⊂ [0, 1]` of the segment `a → b` inside the
/// triangle (Cyrus–Beck clipping against the three edges).
fn clip_segment(geo: &ElementGeometry, a: [f64; 2], b: [f64; 2]) -> Option<(f64, f64)> {
    let (mut s0, mut s1) = (0.0f64, 1.0f64);
    let d = [b[0] - a[0], b[1] - a[1]];
    let tol = 1e-12 * (geo.area.abs().sqrt()).max(1e-300);
    for k in 0..3 {
        let p = geo.coords[k];
        let q = geo.coords[(k + 1) % 3];
        let edge = [q[0] - p[0], q[1] - p[1]];
        // Inside (counter-clockwise) when cross(edge, P − p) ≥ 0.
        let c0 = edge[0] * (a[1] - p[1]) - edge[1] * (a[0] - p[0]) + tol * (edge[0].hypot(edge[1]));
        let c1 = edge[0] * d[1] - edge[1] * d[0];
        if c1.abs() < 1e-300 {
            if c0 < 0.0 {
                return None;
            }
            continue;
        }
        let s = -c0 / c1;
        if c1 > 0.0 {
            s0 = s0.max(s);
        } else {
            s1 = s1.min(s);
        }
        if s0 >= s1 {
            return None;
        }
    }
    (s1 - s0 > 1e-14).then_some((s0, s1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::{Identity, Polynomial1D};

    #[test]
    fn counts_and_phases() {
        let m = generate_1d_example_mesh(10, 4, &[0.4, 0.6], &Identity::<1>::new(1.0)).unwrap();
        assert_eq!(m.n_elements(), 80);
        assert_eq!(m.n_vertices(), 55);
        assert_eq!(m.periodic_pairs.len(), 11);
        for el in &m.elements {
            let c = m.spatial.centroid(el.column);
            let inside = (0.4..=0.6).contains(&c);
            assert_eq!(el.phase == INNER_PHASE, inside);
        }
        assert!((m.volume() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_top_right_corner() {
        let motion = Polynomial1D::default();
        let m = generate_1d_example_mesh(10, 4, &[0.4, 0.6], &motion).unwrap();
        let top_right = m.vertex_index(4, 10);
        assert_eq!(m.vertices[top_right], [1.0, 2.0]);
        m.check_invariants(&motion).unwrap();
        assert!((m.volume() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_interfaces() {
        let id = Identity::<1>::new(1.0);
        assert!(generate_1d_example_mesh(10, 4, &[0.6, 0.4], &id).is_err());
        assert!(generate_1d_example_mesh(10, 4, &[0.0], &id).is_err());
        assert!(generate_1d_example_mesh(10, 4, &[0.41, 0.42], &id).is_err());
    }

    #[test]
    fn element_geometry_gradients() {
        let g = ElementGeometry::new([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]);
        assert_eq!(g.area, 1.0);
        assert_eq!(g.gradient(&[0.0, 1.0, 0.0]), [1.0, 0.0]);
        assert_eq!(g.gradient(&[0.0, 0.0, 1.0]), [0.0, 0.5]);
        let l = g.barycentric([0.25, 0.5]);
        assert!((l[0] - 0.5).abs() < 1e-15 && (l[1] - 0.25).abs() < 1e-15);
    }
}
