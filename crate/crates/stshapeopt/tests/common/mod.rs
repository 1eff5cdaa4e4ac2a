//! Shared fixtures and test-side oracles. Nothing here calls the library's
//! derivative code; oracles only solve, deform and integrate.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use stshapeopt::expr::{Expr, ExprField};
use stshapeopt::fem::{error_norms, evaluate_objective, solve_state, Assembler, NewtonOptions, StateProblem};
use stshapeopt::functions::{FnField, Integrand, ScalarField};
use stshapeopt::materials::{Material, PhaseLayout, ReluctivityLaw};
use stshapeopt::mesh::{generate_1d_example_mesh, SpaceTimeMesh, SpatialField, INNER_PHASE, OUTER_PHASE};
use stshapeopt::motion::{Identity, Motion, Polynomial1D};
use stshapeopt::optimizer::ShapeProblem;
use stshapeopt::quadrature::TriangleRule;

pub mod kernel_fd;

pub const PAPER_J0: f64 = 5.091e-4;
pub const PAPER_J_FINAL: f64 = 4.231e-4;
pub const SOURCE: &str = "(xi - 0.4) * (xi - 0.6) * sqrt(x) * (1 + t - x)";

/// Owns everything a [`ShapeProblem`] borrows.
pub struct Fixture {
    pub motion: Arc<dyn Motion<1>>,
    pub layout: PhaseLayout,
    pub source: Box<dyn ScalarField>,
    pub objective: Box<dyn Integrand>,
    pub rule: TriangleRule,
    pub newton: NewtonOptions,
    pub interfaces: Vec<f64>,
}

impl Fixture {
    pub fn problem(&self) -> ShapeProblem<'_> {
        ShapeProblem {
            layout: &self.layout,
            motion: &*self.motion,
            source: &*self.source,
            objective: &*self.objective,
            newton: self.newton,
            quadrature: &self.rule,
        }
    }

    pub fn mesh(&self, n_x: usize, n_t: usize) -> SpaceTimeMesh {
        generate_1d_example_mesh(n_x, n_t, &self.interfaces, &*self.motion).expect("mesh")
    }

    /// Objective after a fresh state solve, tight Newton tolerance.
    pub fn objective_on(&self, mesh: &SpaceTimeMesh) -> f64 {
        let asm = Assembler::with_rule(
            StateProblem { mesh, layout: &self.layout, motion: &*self.motion, source: &*self.source },
            &self.rule,
        )
        .expect("assembler");
        let u = solve_state(&asm, &self.newton, None).expect("state").u;
        evaluate_objective(&asm, &u, &*self.objective).expect("objective")
    }

    /// One-sided shape finite difference `(J(Ω_εθ) − J(Ω)) / ε`.
    pub fn shape_fd(&self, mesh: &SpaceTimeMesh, theta: &SpatialField, eps: f64) -> f64 {
        let j0 = self.objective_on(mesh);
        let moved = mesh.deformed(&*self.motion, theta, eps).expect("deformed mesh");
        (self.objective_on(&moved) - j0) / eps
    }
}

fn expr_source(motion: &Arc<dyn Motion<1>>, text: &str) -> Box<dyn ScalarField> {
    Box::new(ExprField::new(Expr::parse(text).expect("source"), motion.clone()).expect("source field"))
}

/// The moving-inclusion problem with `σ, ν` given per phase.
pub fn moving_inclusion(inner: Material, outer: Material) -> Fixture {
    let motion: Arc<dyn Motion<1>> = Arc::new(Polynomial1D::new(1.0));
    Fixture {
        source: expr_source(&motion, SOURCE),
        motion,
        layout: PhaseLayout::new().with(INNER_PHASE, inner).with(OUTER_PHASE, outer),
        objective: Box::new(stshapeopt::functions::Identity),
        rule: TriangleRule::three_point(),
        newton: NewtonOptions { tol: 1e-13, ..Default::default() },
        interfaces: vec![0.4, 0.6],
    }
}

/// σ = 10, ν = 1 inside; σ = 0, ν = 10 outside.
pub fn paper_problem() -> Fixture {
    moving_inclusion(Material::linear(10.0, 1.0), Material::linear(0.0, 10.0))
}

/// The background follows a saturating curve that is active at the
/// solution's gradient scale.
pub fn curve_problem() -> Fixture {
    let curve = stshapeopt::materials::CurveParams { nu_a: 10.0, c1: 2.0, c2: 2000.0, c3: 2.0 };
    let mut f = moving_inclusion(Material::linear(10.0, 1.0), Material { sigma: 0.0, nu: ReluctivityLaw::Curve(curve) });
    f.source = expr_source(&f.motion, &format!("40 * {SOURCE}"));
    f
}

/// Static interfaces with a time-periodic forcing.
pub fn identity_problem() -> Fixture {
    let motion: Arc<dyn Motion<1>> = Arc::new(Identity::<1>::new(1.0));
    Fixture {
        source: expr_source(&motion, "(1 + sin(2 * pi * t)) * (1 + x)"),
        motion,
        layout: PhaseLayout::new().with(INNER_PHASE, Material::linear(1.0, 1.0)).with(OUTER_PHASE, Material::linear(0.0, 4.0)),
        objective: Box::new(stshapeopt::functions::HalfSquare),
        rule: TriangleRule::three_point(),
        newton: NewtonOptions { tol: 1e-13, ..Default::default() },
        interfaces: vec![0.3, 0.7],
    }
}

/// A smooth deformation vanishing at both ends of `D`.
pub fn smooth_theta(mesh: &SpaceTimeMesh) -> SpatialField {
    SpatialField::from_fn(&mesh.spatial, |x| x * (1.0 - x) * (1.0 + 2.0 * x))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Seeded generator so every run sees the same samples.
pub fn rng(seed: u64) -> rand::rngs::StdRng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Observed L² and H¹ orders against `u = sin(πx)(1 + ½ sin 2πt)` on a
/// static domain, σ = 1 inside (0.4, 0.6) and `outer_sigma` outside.
pub fn manufactured_orders(outer_sigma: f64) -> (f64, f64) {
    let motion = Identity::<1>::new(1.0);
    let exact = |t: f64, x: f64| {
        let a = 1.0 + 0.5 * (2.0 * PI * t).sin();
        ((PI * x).sin() * a, PI * (PI * x).cos() * a)
    };
    let sigma = move |x: f64| if (0.4..=0.6).contains(&x) { 1.0 } else { outer_sigma };
    let f = FnField::new(
        move |t: f64, x: f64| {
            sigma(x) * (PI * x).sin() * PI * (2.0 * PI * t).cos() + PI * PI * (PI * x).sin() * (1.0 + 0.5 * (2.0 * PI * t).sin())
        },
        move |t: f64, x: f64| {
            sigma(x) * PI * PI * (PI * x).cos() * (2.0 * PI * t).cos() + PI.powi(3) * (PI * x).cos() * (1.0 + 0.5 * (2.0 * PI * t).sin())
        },
    );
    let layout = PhaseLayout::new()
        .with(INNER_PHASE, Material::linear(1.0, 1.0))
        .with(OUTER_PHASE, Material::linear(outer_sigma, 1.0));
    let mut l2 = Vec::new();
    let mut h1 = Vec::new();
    for n in [20, 40, 80] {
        let mesh = generate_1d_example_mesh(n, n, &[0.4, 0.6], &motion).unwrap();
        let asm = Assembler::new(StateProblem { mesh: &mesh, layout: &layout, motion: &motion, source: &f }).unwrap();
        let u = solve_state(&asm, &NewtonOptions::default(), None).unwrap().u;
        let e = error_norms(&mesh, &u, exact, None).unwrap();
        l2.push((1.0 / n as f64, e.l2));
        h1.push((1.0 / n as f64, e.h1));
    }
    (loglog_slope(&l2[1..]), loglog_slope(&h1[1..]))
}

/// Newton order from the last three relative residuals above the roundoff
/// floor: `ln(r_k / r_{k−1}) / ln(r_{k−1} / r_{k−2})`.
pub fn newton_tail_order(relative_residuals: &[f64]) -> f64 {
    let tail: Vec<f64> = relative_residuals.iter().copied().filter(|&v| v > 1e-12).collect();
    if tail.len() < 3 {
        return f64::NAN;
    }
    let k = tail.len() - 1;
    (tail[k] / tail[k - 1]).ln() / (tail[k - 1] / tail[k - 2]).ln()
}
