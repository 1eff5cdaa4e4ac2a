//! Solves the moving-interface state problem on a sequence of meshes and
//! reports the objective `J = ∫∫ u`, with a Richardson extrapolation.
use std::sync::Arc;

use stshapeopt::expr::{Expr, ExprField};
use stshapeopt::fem::{evaluate_objective, solve_state, Assembler, NewtonOptions, StateProblem};
use stshapeopt::functions::Identity;
use stshapeopt::materials::{Material, PhaseLayout};
use stshapeopt::mesh::{generate_1d_example_mesh, INNER_PHASE, OUTER_PHASE};
use stshapeopt::motion::{Motion, Polynomial1D};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let motion: Arc<dyn Motion<1>> = Arc::new(Polynomial1D::new(1.0));
    let source = ExprField::new(Expr::parse("(xi - 0.4) * (xi - 0.6) * sqrt(x) * (1 + t - x)")?, motion.clone())?;
    let layout = PhaseLayout::new()
        .with(INNER_PHASE, Material::linear(10.0, 1.0))
        .with(OUTER_PHASE, Material::linear(0.0, 10.0));
    let mut values = Vec::new();
    for n in [20, 40, 80, 160] {
        let mesh = generate_1d_example_mesh(n, n, &[0.4, 0.6], &*motion)?;
        let asm = Assembler::new(StateProblem { mesh: &mesh, layout: &layout, motion: &*motion, source: &source })?;
        let state = solve_state(&asm, &NewtonOptions::default(), None)?;
        let j = evaluate_objective(&asm, &state.u, &Identity)?;
        println!("n = {n:4}: J = {j:.8e}");
        values.push(j);
    }
    let k = values.len();
    let (a, b, c) = (values[k - 3], values[k - 2], values[k - 1]);
    let order = ((b - a) / (c - b)).log2();
    println!("observed order {order:.2}, extrapolated J = {:.6e}", c + (c - b) / (2f64.powf(order) - 1.0));
    Ok(())
}
