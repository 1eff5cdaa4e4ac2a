//! Damped Newton on a saturating reluctivity: residual history and the
//! contraction ratios ‖R_{k+1}‖ / ‖R_k‖².
use stshapeopt::fem::{solve_state, Assembler, NewtonOptions, StateProblem};
use stshapeopt::functions::FnField;
use stshapeopt::materials::{CurveParams, Material, PhaseLayout, ReluctivityLaw};
use stshapeopt::mesh::{generate_1d_example_mesh, INNER_PHASE, OUTER_PHASE};
use stshapeopt::motion::Polynomial1D;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let motion = Polynomial1D::new(1.0);
    let curve = CurveParams { nu_a: 10.0, c1: 1.0, c2: 5.0, c3: 2.0 };
    let layout = PhaseLayout::new()
        .with(INNER_PHASE, Material { sigma: 10.0, nu: ReluctivityLaw::Curve(curve) })
        .with(OUTER_PHASE, Material { sigma: 0.0, nu: ReluctivityLaw::Curve(curve) });
    let f = FnField::new(|t: f64, x: f64| 20.0 * (1.0 + t) * (1.0 - 2.0 * x), |t: f64, _x: f64| -40.0 * (1.0 + t));
    let mesh = generate_1d_example_mesh(40, 40, &[0.4, 0.6], &motion)?;
    let asm = Assembler::new(StateProblem { mesh: &mesh, layout: &layout, motion: &motion, source: &f })?;
    let opts = NewtonOptions { tol: 1e-13, ..Default::default() };
    let state = solve_state(&asm, &opts, None)?;
    let r = &state.report.residuals;
    println!("{} Newton iterations, max |u| = {:.4}", state.report.iterations, state.u.max_abs());
    for k in 0..r.len() {
        let ratio = if k > 0 && r[k - 1] > 0.0 { format!("{:.3e}", r[k] / (r[k - 1] * r[k - 1])) } else { "-".into() };
        let damping = if k > 0 { format!("{:.3}", state.report.dampings[k - 1]) } else { "-".into() };
        println!("  k = {k:2}: |R| = {:.3e}  damping {damping:>6}  |R_k|/|R_k-1|^2 = {ratio}", r[k]);
    }
    Ok(())
}
