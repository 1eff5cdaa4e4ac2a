//! Surface form of the derivative for piecewise-constant coefficients.

use crate::fem::{Assembler, Field};
use crate::materials::PhaseId;
use crate::mesh::SpatialField;
use crate::motion::Motion1D;

use super::ShapeError;

/// Surface density at one interface point of `Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceDensity {
    /// Spatial node carrying the interface.
    pub node: usize,
    pub xi: f64,
    /// Outward normal of `Ω` (`±1`).
    pub normal: f64,
    /// `v_Ω(ξ)`.
    pub value: f64,
}

/// `J′(Ω)(θ) = Σ v_Ω(ξ) θ(ξ) n(ξ)` over the interface points.
pub fn pair_surface(densities: &[InterfaceDensity], theta: &SpatialField) -> f64 {
    densities.iter().map(|d| d.value * d.normal * theta.values[d.node]).sum()
}

/// `v_Ω(ξ) = −(σ₂ − σ₁) ∫ |∇φ_t| (du/dt) p dt + (1/ν₂ − 1/ν₁) ∫ |∇φ_t| (ν ∂_x u)(ν ∂_x p) dt`
/// at each boundary point of `Ω = {phase == inner}`, where index 1 refers to
/// `Ω` and 2 to the other side.
///
/// The interface is a column of mesh nodes following `t ↦ φ_t(ξ)`, so the
/// material derivative `du/dt` is the difference quotient along the
/// interface edges and needs no one-sided limit. The normal fluxes are the
/// average of the two one-sided second-order differences in `ξ` at each
/// time level (divided by `∇φ_t`). Time integrals use the composite
/// trapezoidal rule on the mesh time levels.
pub fn pde_surface_derivative(
    asm: &Assembler<'_>,
    u: &Field,
    p: &Field,
    inner: PhaseId,
) -> Result<Vec<InterfaceDensity>, ShapeError> {
    if !asm.is_linear() {
        return Err(ShapeError::Unsupported(
            "the surface form is only available for constant reluctivities".into(),
        ));
    }
    for field in [u, p] {
        if field.len() != asm.dofs.n_vertices() {
            return Err(ShapeError::Dimension { expected: asm.dofs.n_vertices(), got: field.len() });
        }
    }
    let mesh = asm.mesh();
    let spatial = &mesh.spatial;
    let motion = asm.problem.motion;
    let layout = asm.problem.layout;
    let nu_of = |phase: PhaseId| -> Result<f64, ShapeError> {
        Ok(layout.get(phase).map_err(crate::fem::FemError::from)?.nu.evaluate_unchecked(0.0).0)
    };
    let sigma_of = |phase: PhaseId| -> Result<f64, ShapeError> {
        Ok(layout.get(phase).map_err(crate::fem::FemError::from)?.sigma)
    };
    let mut out = Vec::new();
    for ip in spatial.interfaces() {
        let (normal, inside, outside) = if ip.left_phase == inner {
            (1.0, ip.left_phase, ip.right_phase)
        } else if ip.right_phase == inner {
            (-1.0, ip.right_phase, ip.left_phase)
        } else {
            continue;
        };
        let i = ip.node;
        let (s1, s2) = (sigma_of(inside)?, sigma_of(outside)?);
        let (n1, n2) = (nu_of(inside)?, nu_of(outside)?);
        let (nu_l, nu_r) = (nu_of(ip.left_phase)?, nu_of(ip.right_phase)?);
        // Second-order one-sided ξ-derivatives need two cells on each side.
        let order2 = i >= 2 && i + 2 < spatial.n_nodes();
        let one_sided = |field: &Field, j: usize, dir: isize| -> f64 {
            let at = |k: isize| field.values[mesh.vertex_index(j, (i as isize + dir * k) as usize)];
            let node = |k: isize| spatial.nodes[(i as isize + dir * k) as usize];
            let (h1, h2) = (node(1) - node(0), node(2) - node(1));
            if order2 {
                // Derivative at node 0 of the parabola through nodes 0, 1, 2.
                let d01 = (at(1) - at(0)) / h1;
                let d12 = (at(2) - at(1)) / h2;
                d01 - h1 * (d12 - d01) / (h1 + h2)
            } else {
                (at(1) - at(0)) / h1
            }
        };
        let xi = ip.xi;
        let flux_product = |j: usize| {
            let g = motion.grad1(mesh.times[j], xi);
            let fu = 0.5 * (nu_l * one_sided(u, j, -1) + nu_r * one_sided(u, j, 1)) / g;
            let fp = 0.5 * (nu_l * one_sided(p, j, -1) + nu_r * one_sided(p, j, 1)) / g;
            g.abs() * fu * fp
        };
        let mut value = 0.0;
        for jt in 0..mesh.n_t {
            let (a, b) = (mesh.vertex_index(jt, i), mesh.vertex_index(jt + 1, i));
            let (ta, tb) = (mesh.times[jt], mesh.times[jt + 1]);
            let dt = tb - ta;
            let dudt = (u.values[b] - u.values[a]) / dt;
            // |∇φ_t| p is integrated exactly enough by Simpson's rule on the slab.
            let gp = |t: f64, pv: f64| motion.grad1(t, xi).abs() * pv;
            let pm = 0.5 * (p.values[a] + p.values[b]);
            let transport = dt / 6.0 * (gp(ta, p.values[a]) + 4.0 * gp(0.5 * (ta + tb), pm) + gp(tb, p.values[b])) * dudt;
            let diffusion = 0.5 * dt * (flux_product(jt) + flux_product(jt + 1));
            value += -(s2 - s1) * transport + (1.0 / n2 - 1.0 / n1) * diffusion;
        }
        out.push(InterfaceDensity { node: i, xi, normal, value });
    }
    Ok(out)
}
