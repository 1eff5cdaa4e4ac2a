//! Shape-gradient descent for the moving inclusion on a coarse mesh, with the
//! history written as CSV.
use std::sync::Arc;

use stshapeopt::expr::{Expr, ExprField};
use stshapeopt::fem::NewtonOptions;
use stshapeopt::functions::Identity;
use stshapeopt::io::{history_csv, format_sci};
use stshapeopt::materials::{Material, PhaseLayout};
use stshapeopt::mesh::{generate_1d_example_mesh, INNER_PHASE, OUTER_PHASE};
use stshapeopt::motion::{Motion, Polynomial1D};
use stshapeopt::optimizer::{optimize, DescentConfig, ShapeProblem};
use stshapeopt::quadrature::TriangleRule;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map_or(Ok(40), |s| s.parse())?;
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
    let mesh = generate_1d_example_mesh(n, n, &[0.4, 0.6], &*motion)?;
    let config = DescentConfig { tau_init: 1e4, max_outer: 60, ..Default::default() };
    let report = optimize(&problem, mesh, &config, &mut |row, mesh, _| {
        if row.iter % 10 == 0 {
            let ifs: Vec<String> = mesh.spatial.interfaces().iter().map(|p| format!("{:.4}", p.xi)).collect();
            println!("iter {:3}: J = {}  interfaces [{}]", row.iter, format_sci(row.objective), ifs.join(", "));
        }
    })?;
    println!(
        "J {} -> {} after {} iterations ({})",
        format_sci(report.initial_objective()),
        format_sci(report.final_objective()),
        report.history.len() - 1,
        report.termination.name()
    );
    if let Some(step) = report.first_step {
        println!("first step: predicted {:+.4e}, observed {:+.4e}", step.predicted, step.observed);
    }
    print!("{}", history_csv(&report.history[..report.history.len().min(4)]));
    Ok(())
}
