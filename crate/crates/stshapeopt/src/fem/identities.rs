//! Numerical checks of the transport identities behind the adjoint method:
//! the Reynolds rule for `d/dt ∫ σ u p` and its time-integrated form
//! (integration by parts of the total time derivative).

use crate::motion::{Motion, Motion1D};
use crate::quadrature::{gauss_legendre, integrate_interval};

use super::assembly::dot3;
use super::{Assembler, FemError, Field};

/// Terms of `∫_Q σ (du/dt) p = B − ∫_Q σ (dp/dt) u − ∫_Q σ (div v) u p`, with
/// `B = ∫_D σ u p |_{t=T} − ∫_D σ u p |_{t=0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationByParts {
    pub lhs: f64,
    pub boundary: f64,
    pub dp_dt_term: f64,
    pub divergence_term: f64,
}

impl IntegrationByParts {
    /// `lhs − (boundary − dp_dt_term − divergence_term)`.
    pub fn defect(&self) -> f64 {
        self.lhs - (self.boundary - self.dp_dt_term - self.divergence_term)
    }

    /// Largest magnitude among the terms, for relative comparisons.
    pub fn scale(&self) -> f64 {
        [self.lhs, self.boundary, self.dp_dt_term, self.divergence_term]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Evaluates every term of the integration-by-parts relation for two P1
/// fields with the assembler's quadrature. The fields need not be periodic.
pub fn integration_by_parts(asm: &Assembler<'_>, u: &Field, p: &Field) -> Result<IntegrationByParts, FemError> {
    let mut lhs = 0.0;
    let mut dp_dt_term = 0.0;
    let mut divergence_term = 0.0;
    for el in &asm.elements {
        let (uv, pv) = (el.gather(u), el.gather(p));
        let [ut, ux] = el.geo.gradient(&uv);
        let [pt, px] = el.geo.gradient(&pv);
        for q in &el.quad {
            let (uq, pq) = (dot3(&q.lambda, &uv), dot3(&q.lambda, &pv));
            let w = q.weight * el.sigma;
            lhs += w * (ut + q.v * ux) * pq;
            dp_dt_term += w * (pt + q.v * px) * uq;
            divergence_term += w * q.vx * uq * pq;
        }
    }
    let mesh = asm.mesh();
    let (gx, gw) = gauss_legendre(2);
    let trace = |level: usize, slab: usize| -> f64 {
        let mut total = 0.0;
        for i in 0..mesh.n_x {
            let (a, b) = (mesh.vertex_index(level, i), mesh.vertex_index(level, i + 1));
            let sigma = mesh
                .cell_elements(slab, i)
                .iter()
                .find(|&&e| mesh.elements[e].vertices.contains(&a) && mesh.elements[e].vertices.contains(&b))
                .map(|&e| asm.elements[e].sigma)
                .unwrap_or(0.0);
            let h = mesh.vertices[b][1] - mesh.vertices[a][1];
            for (s, w) in gx.iter().zip(&gw) {
                let uq = u.values[a] * (1.0 - s) + u.values[b] * s;
                let pq = p.values[a] * (1.0 - s) + p.values[b] * s;
                total += w * h * sigma * uq * pq;
            }
        }
        total
    };
    let boundary = trace(mesh.n_t, mesh.n_t - 1) - trace(0, 0);
    Ok(IntegrationByParts { lhs, boundary, dp_dt_term, divergence_term })
}

/// An analytic field returning `[value, ∂_t, ∂_x]` at `(t, x)`.
pub type AnalyticField<'a> = &'a dyn Fn(f64, f64) -> [f64; 3];

/// Both sides of the Reynolds rule at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReynoldsCheck {
    /// Central difference of `I(t) = ∫_{φ_t(D)} σ u p dx` with step `h`.
    pub derivative: f64,
    /// `∫ σ (du/dt) p + ∫ σ u (dp/dt) + ∫ σ (div v) u p` at `t`.
    pub terms: f64,
}

impl ReynoldsCheck {
    pub fn defect(&self) -> f64 {
        self.derivative - self.terms
    }
}

/// Evaluates the Reynolds rule on `D = φ_t((ξ_0, ξ_k))` for a conductivity
/// attached to reference points and piecewise smooth between `breakpoints`
/// (increasing, including both ends). Integrals use 12-point Gauss rules on
/// every reference piece, so the defect is dominated by the `O(h²)` error of
/// the central difference.
pub fn reynolds_check(
    motion: &dyn Motion<1>,
    sigma: &dyn Fn(f64) -> f64,
    breakpoints: &[f64],
    u: AnalyticField<'_>,
    p: AnalyticField<'_>,
    t: f64,
    h: f64,
) -> ReynoldsCheck {
    let integral = |tt: f64, g: &dyn Fn(f64, f64) -> f64| -> f64 {
        breakpoints
            .windows(2)
            .map(|w| {
                integrate_interval(w[0], w[1], 12, |xi| {
                    let x = motion.forward1(tt, xi);
                    sigma(xi) * g(tt, x) * motion.grad1(tt, xi)
                })
            })
            .sum()
    };
    let product = |tt: f64, x: f64| u(tt, x)[0] * p(tt, x)[0];
    let derivative = (integral(t + h, &product) - integral(t - h, &product)) / (2.0 * h);
    let terms = integral(t, &|tt, x| {
        let (uu, pp) = (u(tt, x), p(tt, x));
        let y = motion.inverse1(tt, x).expect("quadrature point lies in the moving domain");
        let v = motion.dt1(tt, y);
        let div_v = motion.dt_grad1(tt, y) / motion.grad1(tt, y);
        (uu[1] + v * uu[2]) * pp[0] + uu[0] * (pp[1] + v * pp[2]) + div_v * uu[0] * pp[0]
    });
    ReynoldsCheck { derivative, terms }
}
