//! Reluctivity laws and the air-gap torque weight.
mod common;

use nalgebra::{Matrix2, Vector2};
use rand::Rng;
use stshapeopt::materials::{
    arkkio_q, arkkio_torque, reluctivity, ArkkioParams, CurveParams, PlanarMesh, ReluctivityLaw, NU_VACUUM,
};

fn iron() -> ReluctivityLaw {
    ReluctivityLaw::Curve(CurveParams::iron())
}

#[test]
fn iron_curve_at_zero_and_constant_law() {
    let (nu, dnu) = reluctivity(0.0, &iron()).unwrap();
    assert_eq!((nu, dnu), (200.0, 0.0));
    assert_eq!(reluctivity(3.7, &ReluctivityLaw::Constant(1.0)).unwrap(), (1.0, 0.0));
    assert!(reluctivity(-1.0, &iron()).is_err());
    assert!(reluctivity(f64::NAN, &iron()).is_err());
    assert!((CurveParams::iron().nu_a - 1e7 / (4.0 * std::f64::consts::PI)).abs() < 1e-9);
    assert_eq!(CurveParams::iron().nu_a, NU_VACUUM);
}

#[test]
fn derivative_matches_central_difference() {
    let law = iron();
    for s in [0.5, 1.3, 2.0, 10.0] {
        let h = 1e-6;
        let fd = (reluctivity(s + h, &law).unwrap().0 - reluctivity(s - h, &law).unwrap().0) / (2.0 * h);
        let (_, dnu) = reluctivity(s, &law).unwrap();
        let scale = dnu.abs().max(1e-300);
        if s == 10.0 {
            // Fully saturated: both vanish to roundoff.
            assert!(dnu.abs() < 1e-6 && fd.abs() < 1e-2, "s = {s}: {dnu} vs {fd}");
        } else {
            assert!((dnu - fd).abs() / scale < 1e-6, "s = {s}: {dnu} vs {fd}");
        }
    }
}

#[test]
fn strong_monotonicity_and_lipschitz_on_sampled_pairs() {
    let law = iron();
    let lower = law.nu_lower();
    let lip = law.lipschitz_constant();
    let mut rng = common::rng(7);
    let b = |s: f64| reluctivity(s, &law).unwrap().0 * s;
    for k in 0..10_000 {
        // Half of the pairs in the knee of the curve, half over the full range.
        let hi = if k % 2 == 0 { 5.0 } else { 1e5 };
        let (s1, s2) = (rng.random_range(0.0..hi), rng.random_range(0.0..hi));
        let d = (b(s1) - b(s2)) * (s1 - s2);
        assert!(d >= lower * (s1 - s2).powi(2) * (1.0 - 1e-9) - 1e-9, "monotonicity at ({s1}, {s2})");
        assert!((b(s1) - b(s2)).abs() <= lip * (s1 - s2).abs() * (1.0 + 1e-12) + 1e-9, "Lipschitz at ({s1}, {s2})");
    }
}

#[test]
fn chord_slopes_exceed_nu_a_near_the_knee() {
    // The Lipschitz constant of s ↦ ν̂(s)s is not ν_a: the derivative
    // ν̂ + sν̂′ overshoots it where the curve saturates.
    let law = iron();
    let nu_a = law.nu_upper();
    let (s, tangent) = (0..4000)
        .map(|k| k as f64 * 1e-3)
        .map(|s| (s, law.tangent(s)))
        .fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    assert!(tangent > 2.5 * nu_a, "max tangent {tangent} at s = {s}");
    assert!((law.lipschitz_constant() - tangent).abs() / tangent < 1e-5);
}

#[test]
fn tangent_bounded_below_and_linearized_tensor_elliptic() {
    let law = iron();
    let lower = law.nu_lower();
    let mut rng = common::rng(11);
    for _ in 0..10_000 {
        let s: f64 = if rng.random_bool(0.5) { rng.random_range(0.0..5.0) } else { rng.random_range(0.0..1e5) };
        assert!(law.tangent(s) >= lower - 1e-12, "s ν' + ν at {s}");
        let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let b: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let xi = Vector2::new(a.cos(), a.sin());
        let g = Vector2::new(b.cos(), b.sin()) * s;
        let (nu, q) = law.linearized(s);
        let form = nu * xi.norm_squared() + q * g.dot(&xi).powi(2);
        assert!(form >= lower * xi.norm_squared() - 1e-12, "ellipticity at s = {s}");
    }
}

#[test]
fn torque_weight_identities() {
    assert_eq!(arkkio_q(&Vector2::new(1.0, 0.0)).unwrap(), Matrix2::new(0.0, -0.5, -0.5, 0.0));
    assert_eq!(arkkio_q(&Vector2::new(0.0, 2.0)).unwrap(), Matrix2::new(0.0, 1.0, 1.0, 0.0));
    assert!(arkkio_q(&Vector2::zeros()).is_err());
    let mut rng = common::rng(3);
    for _ in 0..1000 {
        let x = Vector2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let q = arkkio_q(&x).unwrap();
        assert_eq!(q, q.transpose());
        assert!(q.trace().abs() < 1e-12);
        assert!((q.norm() - x.norm() / 2f64.sqrt()).abs() < 1e-12);
    }
}

/// Sector `r ∈ [r0, r1]`, angle `∈ [0, π/3]`, triangulated like the annulus.
fn sector(r0: f64, r1: f64, n_r: usize, n_a: usize) -> PlanarMesh {
    let mut nodes = Vec::new();
    for i in 0..=n_r {
        let r = r0 + (r1 - r0) * i as f64 / n_r as f64;
        for j in 0..=n_a {
            let a = std::f64::consts::FRAC_PI_3 * j as f64 / n_a as f64;
            nodes.push(Vector2::new(r * a.cos(), r * a.sin()));
        }
    }
    let id = |i: usize, j: usize| i * (n_a + 1) + j;
    let mut triangles = Vec::new();
    for i in 0..n_r {
        for j in 0..n_a {
            triangles.push([id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i + 1, j)]);
        }
    }
    PlanarMesh { nodes, triangles }
}

/// Gauss–Legendre on [0, 1] with 8 points, by Newton on the Legendre
/// polynomial (independent of the library's rule tables).
fn gauss8() -> Vec<(f64, f64)> {
    let n = 8;
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                x -= p1 / dp;
            }
            (0.5 * (1.0 - x), 1.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn dense_integral(mesh: &PlanarMesh, f: impl Fn(Vector2<f64>) -> f64) -> f64 {
    let g = gauss8();
    let mut total = 0.0;
    for tri in &mesh.triangles {
        let [a, b, c] = tri.map(|i| mesh.nodes[i]);
        let area2 = (b - a).perp(&(c - a)).abs();
        for &(u, wu) in &g {
            for &(v, wv) in &g {
                // Duffy: (u, v) ↦ a + u (b − a) + u v (c − b).
                let p = a + (b - a) * u + (c - b) * (u * v);
                total += wu * wv * u * area2 * f(p);
            }
        }
    }
    total
}

#[test]
fn torque_of_a_linear_potential_matches_dense_quadrature() {
    let mesh = sector(0.8, 1.0, 3, 12);
    let u: Vec<f64> = mesh.nodes.iter().map(|p| p.x).collect();
    let params = ArkkioParams { r_rotor: 0.8, r_stator: 1.0, length: 2.0, nu_a: 3.0, period: 0.5 };
    let torque = arkkio_torque(&mesh, &[(0.0, u)], &params).unwrap();
    let oracle = dense_integral(&mesh, |x| x.x * x.y / x.norm()) * 2.0 * 3.0 / 0.2;
    assert!((torque - oracle).abs() <= 1e-10 * oracle.abs(), "{torque} vs {oracle}");

    let constant = vec![1.0; mesh.nodes.len()];
    assert_eq!(arkkio_torque(&mesh, &[(0.0, constant)], &params).unwrap(), 0.0);
    let far = ArkkioParams { r_rotor: 5.0, r_stator: 6.0, ..params };
    assert!(arkkio_torque(&mesh, &[(0.0, vec![0.0; mesh.nodes.len()])], &far).is_err());
}

#[test]
fn torque_of_a_radial_potential_vanishes_under_refinement() {
    let params = ArkkioParams { r_rotor: 0.8, r_stator: 1.0, length: 1.0, nu_a: 1.0, period: 1.0 };
    let mut previous = f64::INFINITY;
    let mut rng = common::rng(5);
    for n in [6, 12, 24, 48] {
        let mut mesh = sector(0.8, 1.0, n / 3, n);
        // Jitter interior nodes so that symmetry does not cancel the error.
        let h = 0.2 / (n / 3) as f64;
        let n_a = n + 1;
        for (k, p) in mesh.nodes.iter_mut().enumerate() {
            let (i, j) = (k / n_a, k % n_a);
            if i > 0 && i < n / 3 && j > 0 && j < n {
                *p += Vector2::new(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1)) * h;
            }
        }
        let u: Vec<f64> = mesh.nodes.iter().map(|p| (3.0 * p.norm()).sin()).collect();
        let t = arkkio_torque(&mesh, &[(0.0, u)], &params).unwrap().abs();
        assert!(t < previous, "n = {n}: {t} !< {previous}");
        previous = t;
    }
    assert!(previous < 1e-3, "{previous}");
}
