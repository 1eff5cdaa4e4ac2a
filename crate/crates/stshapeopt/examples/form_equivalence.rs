//! Volume and boundary forms of the same shape derivative: first for the
//! academic functional `∫∫_{Q_Ω} f`, then for the PDE-constrained `∫∫ u`.
use stshapeopt::fem::{solve_continuous_adjoint, solve_state, Assembler, NewtonOptions, StateProblem};
use stshapeopt::functions::{FnField, Identity};
use stshapeopt::materials::{Material, PhaseLayout};
use stshapeopt::mesh::{generate_1d_example_mesh, SpatialField, INNER_PHASE, OUTER_PHASE};
use stshapeopt::motion::Polynomial1D;
use stshapeopt::shape::{
    academic_surface_derivative, academic_volume_derivative, pair_surface, pde_surface_derivative, pde_volume_densities,
    DensityRule,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let motion = Polynomial1D::new(1.0);
    let f = FnField::new(|t: f64, x: f64| (1.0 + t) * (3.0 * x).cos(), |t: f64, x: f64| -3.0 * (1.0 + t) * (3.0 * x).sin());
    let theta = |x: f64| x * (1.0 - x) * (1.0 + x);
    println!("academic functional");
    for n in [20, 40, 80] {
        let mesh = generate_1d_example_mesh(n, n, &[0.4, 0.6], &motion)?;
        let th = SpatialField::from_fn(&mesh.spatial, theta);
        let volume = academic_volume_derivative(&f, &mesh, &motion, &th, INNER_PHASE)?;
        let surface = academic_surface_derivative(&f, &[(0.4, -1.0), (0.6, 1.0)], &motion, &theta, 4 * n);
        println!("  n = {n:3}: volume {volume:+.8e}  surface {surface:+.8e}  rel. diff {:.2e}", ((volume - surface) / surface).abs());
    }

    println!("PDE-constrained functional");
    let src = FnField::new(|t: f64, x: f64| x.sqrt() * (1.0 + t - x), |t: f64, x: f64| 0.5 / x.sqrt() * (1.0 + t - x) - x.sqrt());
    let layout = PhaseLayout::new()
        .with(INNER_PHASE, Material::linear(10.0, 1.0))
        .with(OUTER_PHASE, Material::linear(0.0, 10.0));
    // A deformation concentrated near the interfaces.
    let bump = |x: f64| {
        let b = |c: f64| (1.0 - ((x - c) / 0.1).abs()).max(0.0);
        b(0.4) + 0.5 * b(0.6)
    };
    for n in [80, 160] {
        let mesh = generate_1d_example_mesh(n, n, &[0.4, 0.6], &motion)?;
        let asm = Assembler::new(StateProblem { mesh: &mesh, layout: &layout, motion: &motion, source: &src })?;
        let u = solve_state(&asm, &NewtonOptions::default(), None)?.u;
        let p = solve_continuous_adjoint(&asm, &u, &Identity)?;
        let th = SpatialField::from_fn(&mesh.spatial, bump);
        let volume = pde_volume_densities(&asm, &u, &p, &Identity, DensityRule::KernelQuadrature)?.pair(&mesh.spatial, &th)?;
        let surface = pair_surface(&pde_surface_derivative(&asm, &u, &p, INNER_PHASE)?, &th);
        println!("  n = {n:3}: volume {volume:+.8e}  surface {surface:+.8e}  rel. diff {:.2e}", ((volume - surface) / surface).abs());
    }
    Ok(())
}
