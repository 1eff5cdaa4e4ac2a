//! Hilbertian descent directions, line search and the outer loop.
mod common;

use common::{identity_problem, paper_problem, rng, smooth_theta};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use stshapeopt::functions::{Null, Zero};
use stshapeopt::optimizer::{
    check_gradient, hilbertian_direction, optimize, DescentConfig, OptimizeError, Termination,
};
use stshapeopt::shape::{DensityRule, DerivativeDensities};

fn config(tau_init: f64, max_outer: usize) -> DescentConfig {
    DescentConfig { tau_init, max_outer, ..Default::default() }
}

#[test]
fn direction_solves_the_hilbertian_problem() {
    let fx = paper_problem();
    let mesh = fx.mesh(30, 4);
    let spatial = &mesh.spatial;
    let ne = spatial.n_elements();
    let mut gen = rng(21);
    let mut dens = DerivativeDensities::zeros(ne, "random", DensityRule::Exact);
    for e in 0..ne {
        dens.g0[e] = gen.random_range(-1.0..1.0);
        dens.g1[e] = gen.random_range(-1.0..1.0);
    }
    let cfg = DescentConfig { alpha: 0.7, beta: 0.3, ..Default::default() };
    let dir = hilbertian_direction(spatial, &dens, &cfg).unwrap();
    // Dense oracle on the interior nodes: b(θ, η) = ∫ 2α θ′η′ + β θη.
    let n = spatial.n_nodes();
    let mut k = DMatrix::<f64>::zeros(n - 2, n - 2);
    let mut rhs = DVector::<f64>::zeros(n - 2);
    for e in 0..ne {
        let h = spatial.nodes[e + 1] - spatial.nodes[e];
        let (g0, g1) = (dens.g0[e], dens.g1[e]);
        for a in 0..2 {
            let i = e + a;
            if i == 0 || i == n - 1 {
                continue;
            }
            let slope_a = if a == 0 { -1.0 / h } else { 1.0 / h };
            rhs[i - 1] += g0 * h / 2.0 + g1 * slope_a * h;
            for b in 0..2 {
                let j = e + b;
                if j == 0 || j == n - 1 {
                    continue;
                }
                let slope_b = if b == 0 { -1.0 / h } else { 1.0 / h };
                let mass = if a == b { h / 3.0 } else { h / 6.0 };
                k[(i - 1, j - 1)] += 2.0 * cfg.alpha * slope_a * slope_b * h + cfg.beta * mass;
            }
        }
    }
    let theta = k.clone().lu().solve(&rhs).unwrap();
    assert_eq!(dir.theta.values[0], 0.0);
    assert_eq!(dir.theta.values[n - 1], 0.0);
    for i in 1..n - 1 {
        assert!((dir.theta.values[i] + theta[i - 1]).abs() <= 1e-10 * theta.amax(), "node {i}");
    }
    let b = theta.dot(&(&k * &theta));
    assert!((dir.slope + b).abs() <= 1e-10 * b);
    assert!((dir.norm - b.sqrt()).abs() <= 1e-10 * b.sqrt());
}

#[test]
fn zero_densities_give_a_zero_direction() {
    let fx = paper_problem();
    let mesh = fx.mesh(10, 4);
    let dens = DerivativeDensities::zeros(mesh.spatial.n_elements(), "none", DensityRule::Exact);
    let dir = hilbertian_direction(&mesh.spatial, &dens, &DescentConfig::default()).unwrap();
    assert!(dir.theta.values.iter().all(|&v| v == 0.0));
    assert_eq!(dir.norm, 0.0);
}

#[test]
fn invalid_configurations_are_rejected() {
    let bad = [
        DescentConfig { alpha: 0.0, ..Default::default() },
        DescentConfig { beta: -1.0, ..Default::default() },
        DescentConfig { include_cauchy_riemann: true, ..Default::default() },
        DescentConfig { tau_min: 2.0, tau_init: 1.0, ..Default::default() },
        DescentConfig { theta_tol: f64::NAN, ..Default::default() },
    ];
    for cfg in bad {
        assert!(matches!(cfg.validate(), Err(OptimizeError::Config(_))), "{cfg:?}");
    }
}

#[test]
fn trivial_problem_stops_immediately() {
    let mut fx = paper_problem();
    fx.source = Box::new(Zero);
    fx.objective = Box::new(Null);
    let mesh = fx.mesh(10, 10);
    let report = optimize(&fx.problem(), mesh, &config(1.0, 10), &mut |_, _, _| {}).unwrap();
    assert_eq!(report.termination, Termination::ThetaTolerance);
    assert_eq!(report.history.len(), 1);
    assert_eq!(report.final_objective(), 0.0);
}

#[test]
fn zero_iterations_keep_the_initial_design() {
    let fx = paper_problem();
    let mesh = fx.mesh(10, 10);
    let report = optimize(&fx.problem(), mesh.clone(), &config(1.0, 0), &mut |_, _, _| {}).unwrap();
    assert_eq!(report.termination, Termination::MaxIterations);
    assert_eq!(report.history.len(), 1);
    assert_eq!(report.final_mesh, mesh);
    assert!((report.initial_objective() - fx.objective_on(&mesh)).abs() <= 1e-12 * report.initial_objective().abs());
}

#[test]
fn objective_decreases_strictly_and_runs_are_deterministic() {
    let fx = paper_problem();
    let run = || {
        let mut seen = 0;
        let r = optimize(&fx.problem(), fx.mesh(20, 20), &config(1e4, 8), &mut |_, _, _| seen += 1).unwrap();
        assert_eq!(seen, r.history.len());
        r
    };
    let a = run();
    assert!(a.history.len() > 3, "{:?}", a.history);
    assert!(a.is_strictly_decreasing());
    assert!(a.final_objective() < a.initial_objective());
    for w in a.history.windows(2) {
        assert_eq!(w[1].iter, w[0].iter + 1);
        assert!(w[1].tau > 0.0 && w[1].theta_norm > 0.0);
    }
    let b = run();
    assert_eq!(a, b);
    // Interfaces stay ordered and inside D.
    a.final_mesh.check_invariants(&*fx.motion).unwrap();
}

#[test]
fn first_step_matches_the_linear_prediction() {
    let fx = paper_problem();
    let mesh = fx.mesh(20, 20);
    // A small step so that the first-order model applies.
    let eval = fx.problem().evaluate(&mesh, None).unwrap();
    let dens = fx.problem().densities(&mesh, &eval.u, DensityRule::Exact).unwrap();
    let dir = hilbertian_direction(&mesh.spatial, &dens, &DescentConfig::default()).unwrap();
    let tau_small = 1e-2 * eval.objective.abs() / (-dir.slope);
    let report = optimize(&fx.problem(), mesh, &config(tau_small, 1), &mut |_, _, _| {}).unwrap();
    let step = report.first_step.expect("a first step");
    assert!(step.predicted < 0.0 && step.observed < 0.0);
    assert!(((step.observed - step.predicted) / step.predicted).abs() <= 0.2, "{step:?}");
}

#[test]
fn gradient_check_reports_first_order_agreement() {
    let fx = identity_problem();
    let mesh = fx.mesh(24, 24);
    let theta = smooth_theta(&mesh);
    let check = check_gradient(&fx.problem(), &mesh, &theta, &[1e-2, 1e-3, 1e-4, 1e-5], DensityRule::Exact).unwrap();
    assert_eq!(check.rows.len(), 4);
    assert!(check.passes(), "{check:?}");
    assert!(check.best_rel_error() <= 1e-3);
    assert!(check.observed_order.unwrap() > 0.9);
}

#[test]
fn degenerate_trial_meshes_are_refused() {
    use stshapeopt::mesh::SpatialField;
    use stshapeopt::optimizer::{mesh_quality_ok, MIN_ELEMENT_FRACTION};
    let fx = paper_problem();
    let mesh = fx.mesh(20, 4);
    assert!(mesh_quality_ok(&mesh.spatial));
    // Push node 10 towards node 11 until the element between them is at 1% of h.
    let h = mesh.spatial.length(10);
    let mut theta = SpatialField::zeros(21);
    theta.values[10] = 1.0;
    let squeezed = mesh.deformed(&*fx.motion, &theta, 0.99 * h).unwrap();
    assert!(squeezed.spatial.length(10) < MIN_ELEMENT_FRACTION / 20.0);
    assert!(!mesh_quality_ok(&squeezed.spatial));
}
