//! The adjoint shape derivative of `J = ∫∫ u` against one-sided finite
//! differences of the mesh deformation, for every density rule.
use std::sync::Arc;

use stshapeopt::expr::{Expr, ExprField};
use stshapeopt::fem::NewtonOptions;
use stshapeopt::functions::Identity;
use stshapeopt::materials::{Material, PhaseLayout};
use stshapeopt::mesh::{generate_1d_example_mesh, SpatialField, INNER_PHASE, OUTER_PHASE};
use stshapeopt::motion::{Motion, Polynomial1D};
use stshapeopt::optimizer::{check_gradient, ShapeProblem};
use stshapeopt::quadrature::TriangleRule;
use stshapeopt::shape::DensityRule;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let motion: Arc<dyn Motion<1>> = Arc::new(Polynomial1D::new(1.0));
    let source = ExprField::new(Expr::parse("(xi - 0.4) * (xi - 0.6) * sqrt(x) * (1 + t - x)")?, motion.clone())?;
    let layout = PhaseLayout::new()
        .with(INNER_PHASE, Material::linear(10.0, 1.0))
        .with(OUTER_PHASE, Material::linear(0.0, 10.0));
    let rule = TriangleRule::three_point();
    let problem = ShapeProblem {
        layout: &layout,
        motion: &*motion,
        source: &source,
        objective: &Identity,
        newton: NewtonOptions::default(),
        quadrature: &rule,
    };
    let mesh = generate_1d_example_mesh(60, 60, &[0.4, 0.6], &*motion)?;
    let theta = SpatialField::from_fn(&mesh.spatial, |x| (std::f64::consts::PI * x).sin());

    for density_rule in [DensityRule::Exact, DensityRule::KernelQuadrature, DensityRule::CentroidTrajectory] {
        let check = check_gradient(&problem, &mesh, &theta, &[1e-2, 1e-3, 1e-4, 1e-5], density_rule)?;
        println!("{:>20}: J'(θ) = {:+.8e}", density_rule.name(), check.adjoint);
        for r in &check.rows {
            println!("{:>24.0e}  FD {:+.8e}  rel. error {:.2e}", r.eps, r.finite_difference, r.rel_error);
        }
        println!("{:>24}  observed order {:.2}", "", check.observed_order.unwrap_or(f64::NAN));
    }
    Ok(())
}
