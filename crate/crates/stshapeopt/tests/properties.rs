//! Randomized properties of the parsers, formatters, deformations and
//! derivative forms.
mod common;

use proptest::prelude::*;
use stshapeopt::config::RunConfig;
use stshapeopt::expr::{Env, Expr};
use stshapeopt::io::format_sci;
use stshapeopt::mesh::{generate_1d_example_mesh, SpatialField};
use stshapeopt::motion::Polynomial1D;
use stshapeopt::shape::{DensityRule, DerivativeDensities};

fn env(t: f64, x: f64, u: f64) -> Env {
    Env { t, x, xi: x, dxi_dx: 1.0, u }
}

proptest! {
    #[test]
    fn scientific_format_round_trips(x in prop::num::f64::NORMAL | prop::num::f64::ZERO) {
        let s = format_sci(x);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-12 * x.abs(), "{s}");
        let (mantissa, exp) = s.split_once('e').unwrap();
        prop_assert_eq!(mantissa.trim_start_matches('-').len(), 14);
        prop_assert!(exp.starts_with('+') || exp.starts_with('-'));
        prop_assert!(exp.len() >= 3);
    }

    #[test]
    fn polynomial_expressions_evaluate_with_derivatives(
        a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0,
        t in 0.0f64..1.0, x in 0.0f64..2.0, u in -5.0f64..5.0,
    ) {
        let e = Expr::parse(&format!("{a} * x^2 + ({b}) * u * x - {c} / (1 + t)")).unwrap();
        let d = e.eval(&env(t, x, u));
        let scale = 1.0 + a.abs() + b.abs() + c.abs();
        prop_assert!((d.v - (a * x * x + b * u * x - c / (1.0 + t))).abs() <= 1e-12 * scale * 10.0);
        prop_assert!((d.dx - (2.0 * a * x + b * u)).abs() <= 1e-12 * scale * 10.0);
        prop_assert!((d.du - b * x).abs() <= 1e-12 * scale * 10.0);
    }

    #[test]
    fn chain_rule_through_functions(x in 0.1f64..2.0, u in -2.0f64..2.0) {
        let e = Expr::parse("sin(x * u) + exp(-x) * sqrt(x) + ln(1 + x^2) - abs(u - 3)").unwrap();
        let d = e.eval(&env(0.3, x, u));
        let dx = u * (x * u).cos() - (-x).exp() * x.sqrt() + (-x).exp() * 0.5 / x.sqrt() + 2.0 * x / (1.0 + x * x);
        let du = x * (x * u).cos() + 1.0;
        prop_assert!((d.dx - dx).abs() < 1e-12);
        prop_assert!((d.du - du).abs() < 1e-12);
    }

    #[test]
    fn garbage_never_panics(text in "[-+*/^()xtu0-9a-z. ]{0,24}") {
        let _ = Expr::parse(&text);
    }

    #[test]
    fn configuration_values_survive_parsing(
        n_x in 4usize..400, n_t in 2usize..400, tau in 1e-3f64..1e6, sigma in 0.0f64..100.0,
    ) {
        let text = format!(
            "[problem]\ninterfaces = 0.4, 0.6\nmotion = polynomial\n\
             [materials]\ninner.sigma = {sigma}\ninner.nu = 1\nouter.sigma = 0\nouter.nu = 10\n\
             [source]\nf = 1\n[discretization]\nn_x = {n_x}\nn_t = {n_t}\n[descent]\ntau_init = {tau}\n"
        );
        let cfg = RunConfig::parse(&text).unwrap();
        prop_assert_eq!((cfg.n_x, cfg.n_t), (n_x, n_t));
        prop_assert_eq!(cfg.descent.tau_init, tau);
        prop_assert_eq!(cfg.inner.sigma, sigma);
    }

    #[test]
    fn deformations_compose_and_reverse(
        values in prop::collection::vec(-1.0f64..1.0, 11), t1 in -0.02f64..0.02, t2 in -0.02f64..0.02,
    ) {
        let m = Polynomial1D::new(1.0);
        let mesh = generate_1d_example_mesh(12, 6, &[0.4, 0.6], &m).unwrap();
        let mut theta = SpatialField::zeros(13);
        theta.values[1..12].copy_from_slice(&values);
        let once = mesh.deformed(&m, &theta, t1 + t2).unwrap();
        let twice = mesh.deformed(&m, &theta, t1).unwrap().deformed(&m, &theta, t2).unwrap();
        for (a, b) in once.vertices.iter().zip(&twice.vertices) {
            prop_assert!((a[1] - b[1]).abs() < 1e-12);
        }
        let back = mesh.deformed(&m, &theta, t1).unwrap().deformed(&m, &theta, -t1).unwrap();
        for (a, b) in back.reference.iter().zip(&mesh.reference) {
            prop_assert!((a[1] - b[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn density_pairing_is_linear(
        g in prop::collection::vec(-1.0f64..1.0, 20),
        a in prop::collection::vec(-1.0f64..1.0, 11),
        b in prop::collection::vec(-1.0f64..1.0, 11),
        s in -3.0f64..3.0,
    ) {
        let m = Polynomial1D::new(1.0);
        let mesh = generate_1d_example_mesh(10, 2, &[0.4, 0.6], &m).unwrap();
        let mut d = DerivativeDensities::zeros(10, "random", DensityRule::Exact);
        d.g0.copy_from_slice(&g[..10]);
        d.g1.copy_from_slice(&g[10..]);
        let (fa, fb) = (SpatialField { values: a.clone() }, SpatialField { values: b.clone() });
        let combo = SpatialField { values: a.iter().zip(&b).map(|(x, y)| x + s * y).collect() };
        let lhs = d.pair(&mesh.spatial, &combo).unwrap();
        let rhs = d.pair(&mesh.spatial, &fa).unwrap() + s * d.pair(&mesh.spatial, &fb).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }
}
