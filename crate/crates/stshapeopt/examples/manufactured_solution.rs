//! Convergence of the space-time solver against u = sin(πx)(1 + ½ sin 2πt),
//! first with σ ≡ 1 and then with σ = 0 outside (0.4, 0.6).
use stshapeopt::fem::{error_norms, solve_state, Assembler, NewtonOptions, StateProblem};
use stshapeopt::functions::FnField;
use stshapeopt::materials::{Material, PhaseLayout};
use stshapeopt::mesh::{generate_1d_example_mesh, INNER_PHASE, OUTER_PHASE};
use stshapeopt::motion::Identity;

use std::f64::consts::PI;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let motion = Identity::<1>::new(1.0);
    let exact = |t: f64, x: f64| {
        let a = 1.0 + 0.5 * (2.0 * PI * t).sin();
        ((PI * x).sin() * a, PI * (PI * x).cos() * a)
    };
    for outer_sigma in [1.0, 0.0] {
        let sigma = move |x: f64| if (0.4..=0.6).contains(&x) { 1.0 } else { outer_sigma };
        // f = σ ∂_t u − ∂_xx u
        let f = FnField::new(
            move |t: f64, x: f64| sigma(x) * (PI * x).sin() * PI * (2.0 * PI * t).cos() + PI * PI * (PI * x).sin() * (1.0 + 0.5 * (2.0 * PI * t).sin()),
            move |t: f64, x: f64| sigma(x) * PI * PI * (PI * x).cos() * (2.0 * PI * t).cos() + PI.powi(3) * (PI * x).cos() * (1.0 + 0.5 * (2.0 * PI * t).sin()),
        );
        let layout = PhaseLayout::new()
            .with(INNER_PHASE, Material::linear(1.0, 1.0))
            .with(OUTER_PHASE, Material::linear(outer_sigma, 1.0));
        println!("sigma outside = {outer_sigma}");
        let mut prev: Option<(f64, f64)> = None;
        for n in [10, 20, 40, 80] {
            let mesh = generate_1d_example_mesh(n, n, &[0.4, 0.6], &motion)?;
            let asm = Assembler::new(StateProblem { mesh: &mesh, layout: &layout, motion: &motion, source: &f })?;
            let u = solve_state(&asm, &NewtonOptions::default(), None)?.u;
            let e = error_norms(&mesh, &u, exact, None)?;
            let orders = prev.map_or(String::new(), |(l2, h1)| format!("  orders {:.2} / {:.2}", (l2 / e.l2).log2(), (h1 / e.h1).log2()));
            println!("  n = {n:3}: L2 {:.3e}  H1 {:.3e}{orders}", e.l2, e.h1);
            prev = Some((e.l2, e.h1));
        }
    }
    Ok(())
}
