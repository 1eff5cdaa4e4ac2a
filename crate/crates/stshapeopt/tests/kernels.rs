//! Motion kernels against difference quotients of the perturbed maps.
mod common;

use common::kernel_fd::{errors, perturbed, theta1, theta2};

use stshapeopt::kernel::{contract_matrix, contract_vector, rotation, KernelPoint};
use stshapeopt::motion::{Identity, Mat, Motion, Point, Polynomial1D, Rotation2D};

fn assert_first_order(label: &str, errs: &[(&'static str, [f64; 3])]) {
    for (name, e) in errs {
        if e.iter().all(|v| *v < 1e-9) {
            continue; // exact kernel (difference quotient is exact too)
        }
        let order = (e[0] / e[1]).log10();
        assert!(order >= 0.9 && e[1] < 1e-3, "{label} {name}: errors {e:?}, order {order}");
    }
}

#[test]
fn polynomial_kernels_match_difference_quotients() {
    let m = Polynomial1D::new(1.0);
    for &(t, xi) in &[(0.5, 0.4), (0.1, 0.8), (0.9, 0.25)] {
        let x = Point::<1>::new(Polynomial1D::map(t, xi));
        assert_first_order(&format!("polynomial at t={t}"), &errors(&m, theta1, t, &x));
    }
}

#[test]
fn rotation_kernels_match_difference_quotients() {
    let m = Rotation2D::new(2.0);
    for &(t, x) in &[(0.3, [0.4, -0.2]), (1.1, [0.1, 0.7])] {
        assert_first_order(&format!("rotation at t={t}"), &errors(&m, theta2, t, &Point::<2>::from(x)));
    }
}

#[test]
fn identity_kernels_match_difference_quotients() {
    let m1 = Identity::<1>::new(1.0);
    assert_first_order("identity 1d", &errors(&m1, theta1, 0.4, &Point::<1>::new(0.3)));
    let m2 = Identity::<2>::new(1.0);
    assert_first_order("identity 2d", &errors(&m2, theta2, 0.4, &Point::<2>::new(0.3, 0.6)));
}

#[test]
fn identity_kernels_in_closed_form() {
    let m = Identity::<2>::new(1.0);
    let kp = KernelPoint::new(&m, 0.2, &Point::<2>::new(0.3, 0.5)).unwrap();
    let (th, dth) = theta2(&kp.y);
    assert_eq!(kp.m_prime().value(&th, &dth), dth.trace());
    assert!((contract_matrix(&kp.fxx_prime(), &th, &dth) - dth).norm() < 1e-15);
    assert!(contract_vector(&kp.fxt_prime(), &th, &dth).norm() < 1e-15);
    let a = contract_matrix(&kp.a_prime(), &th, &dth);
    assert!((a - (Mat::<2>::identity() * dth.trace() - dth - dth.transpose())).norm() < 1e-15);
}

#[test]
fn rotation_closed_forms_match_generic_path() {
    let m = Rotation2D::new(3.0);
    for &(t, x) in &[(0.0, [0.5, 0.5]), (0.7, [-0.3, 0.8]), (2.2, [1.2, -0.4])] {
        let x = Point::<2>::from(x);
        let kp = KernelPoint::new(&m, t, &x).unwrap();
        let (th, dth) = theta2(&kp.y);
        let gf = Point::<2>::new(0.3, -1.7);
        let gw = Mat::<2>::new(1.0, 2.0, -0.5, 0.25);
        assert!((kp.m_prime().value(&th, &dth) - rotation::m_prime(&dth)).abs() < 1e-12);
        assert!((contract_matrix(&kp.fxx_prime(), &th, &dth) - rotation::fxx_prime(&m, t, &dth)).norm() < 1e-12);
        assert!((contract_vector(&kp.fxt_prime(), &th, &dth) - rotation::fxt_prime(&m, t, &x, &th, &dth)).norm() < 1e-12);
        assert!((contract_matrix(&kp.a_prime(), &th, &dth) - rotation::a_prime(&m, t, &dth)).norm() < 1e-12);
        assert!((kp.scalar_derivative(&gf).value(&th, &dth) - rotation::scalar_derivative(&m, t, &gf, &th)).abs() < 1e-12);
        assert!(
            (contract_vector(&kp.vector_derivative(&gw), &th, &dth) - rotation::vector_derivative(&m, t, &gw, &th)).norm()
                < 1e-12
        );
        assert!((m.velocity_grad(t, &x).unwrap() - rotation::velocity_grad(&m)).norm() < 1e-12);
        // Constant θ: all gradient terms vanish and A′ = 0.
        let a = contract_matrix(&kp.a_prime(), &th, &Mat::<2>::zeros());
        assert!(a.norm() < 1e-12);
    }
}

#[test]
fn b_prime_is_minus_fxt_prime() {
    let m = Polynomial1D::new(1.0);
    let kp = KernelPoint::new(&m, 0.6, &Point::<1>::new(0.7)).unwrap();
    let (th, dth) = theta1(&kp.y);
    let b = contract_vector(&kp.b_prime(), &th, &dth);
    let f = contract_vector(&kp.fxt_prime(), &th, &dth);
    assert_eq!(b, -f);
}

#[test]
fn polynomial_m_prime_at_reference_point() {
    // t = 0.5, x = φ_0.5(0.4): central difference of the perturbed determinant.
    let m = Polynomial1D::new(1.0);
    let t = 0.5;
    let x = Point::<1>::new(Polynomial1D::map(t, 0.4));
    let kp = KernelPoint::new(&m, t, &x).unwrap();
    let (th, dth) = theta1(&kp.y);
    let h = 1e-6;
    let fd = (perturbed(&m, theta1, t, &x, h).m - perturbed(&m, theta1, t, &x, -h).m) / (2.0 * h);
    assert!((kp.m_prime().value(&th, &dth) - fd).abs() < 1e-8);
}

#[test]
fn motions_satisfy_their_invariants() {
    let p = Polynomial1D::new(1.0);
    let r = Rotation2D::new(1.5);
    for k in 0..20 {
        let t = k as f64 / 19.0;
        for j in 0..20 {
            let y = j as f64 / 19.0;
            let x = p.forward(t, &Point::<1>::new(y));
            assert!((p.inverse(t, &x).unwrap()[0] - y).abs() < 1e-12);
            assert!((p.velocity(t, &x).unwrap() - p.dt(t, &Point::<1>::new(y))).norm() < 1e-12);
            let y2 = Point::<2>::new(y - 0.5, 0.3 * t);
            assert!((r.det(t, &y2) - 1.0).abs() < 1e-14);
            assert!(r.velocity_div(t, &r.forward(t, &y2)).unwrap().abs() < 1e-14);
            assert!((r.inverse(t, &r.forward(t, &y2)).unwrap() - y2).norm() < 1e-12);
        }
    }
    let id = Identity::<2>::new(1.0);
    let y = Point::<2>::new(0.2, 0.9);
    assert_eq!(id.grad(0.3, &y), Mat::<2>::identity());
    assert_eq!(id.velocity(0.3, &y).unwrap(), Point::<2>::zeros());
}
