//! Extra volume terms produced by a permanent magnetization `L` carried by
//! the moving region `D_mag`:
//! `−∫_{Q_{D_mag}} (m′(0)(θ) L + L₁(θ) − F′_xx(0)(θ) L) · ∇p`.

use nalgebra::Matrix1;

use crate::fem::Field;
use crate::functions::ScalarField;
use crate::kernel::{KernelPoint, PullbackLinearForm};
use crate::materials::PhaseId;
use crate::mesh::{SpaceTimeMesh, SpatialField};
use crate::motion::{Motion, Point};
use crate::quadrature::TriangleRule;

use super::{DensityAccumulator, DensityRule, DerivativeDensities, ShapeError};

struct MagPoint {
    kp: KernelPoint<1>,
    column: usize,
    weight: f64,
    l: f64,
    lx: f64,
    px: f64,
}

/// Quadrature points of the magnetized elements with everything the two
/// evaluation paths need.
fn points(
    mesh: &SpaceTimeMesh,
    motion: &dyn Motion<1>,
    l: &dyn ScalarField,
    region: &[PhaseId],
    p: &Field,
) -> Result<Vec<MagPoint>, ShapeError> {
    if p.len() != mesh.n_vertices() {
        return Err(ShapeError::Dimension { expected: mesh.n_vertices(), got: p.len() });
    }
    let rule = TriangleRule::three_point();
    let mut out = Vec::new();
    for (e, el) in mesh.elements.iter().enumerate() {
        if !region.contains(&el.phase) {
            continue;
        }
        let geo = mesh.geometry(e);
        let [_, px] = geo.gradient(&el.vertices.map(|v| p.values[v]));
        for (lam, w) in rule.points.iter().zip(&rule.weights) {
            let [t, x] = geo.point(lam);
            out.push(MagPoint {
                kp: KernelPoint::new(motion, t, &Point::<1>::new(x))?,
                column: el.column,
                weight: w * geo.area,
                l: l.value(t, x),
                lx: l.grad_x(t, x),
                px,
            });
        }
    }
    Ok(out)
}

/// Densities of the supplement, built from the kernel linear forms.
pub fn magnetization_supplement(
    mesh: &SpaceTimeMesh,
    motion: &dyn Motion<1>,
    l: &dyn ScalarField,
    region: &[PhaseId],
    p: &Field,
) -> Result<DerivativeDensities, ShapeError> {
    let spatial = &mesh.spatial;
    let mut acc = DensityAccumulator::new(spatial.n_elements());
    for q in points(mesh, motion, l, region, p)? {
        let l1 = q.kp.vector_derivative(&Matrix1::new(q.lx))[0];
        let form: PullbackLinearForm<1> =
            (q.kp.m_prime() * q.l + l1 - q.kp.fxx_prime()[0][0] * q.l) * (-q.px * q.weight);
        acc.add_form(spatial, q.column, q.kp.y[0], form.a[0], form.b[(0, 0)]);
    }
    Ok(acc.finish(spatial, "magnetization", DensityRule::KernelQuadrature, "3-point element rule"))
}

/// The supplement for one `θ`, contracting each kernel before combining.
pub fn magnetization_supplement_direct(
    mesh: &SpaceTimeMesh,
    motion: &dyn Motion<1>,
    l: &dyn ScalarField,
    region: &[PhaseId],
    p: &Field,
    theta: &SpatialField,
) -> Result<f64, ShapeError> {
    let spatial = &mesh.spatial;
    if theta.values.len() != spatial.n_nodes() {
        return Err(ShapeError::Dimension { expected: spatial.n_nodes(), got: theta.values.len() });
    }
    let mut total = 0.0;
    for q in points(mesh, motion, l, region, p)? {
        let c = q.column;
        let h = spatial.length(c);
        let s = ((q.kp.y[0] - spatial.nodes[c]) / h).clamp(0.0, 1.0);
        let th = Point::<1>::new(theta.values[c] * (1.0 - s) + theta.values[c + 1] * s);
        let dth = Matrix1::new((theta.values[c + 1] - theta.values[c]) / h);
        let m = q.kp.m_prime().value(&th, &dth);
        let fxx = q.kp.fxx_prime()[0][0].value(&th, &dth);
        let l1 = q.lx * (q.kp.g * th)[0];
        total -= q.weight * (m * q.l + l1 - fxx * q.l) * q.px;
    }
    Ok(total)
}
