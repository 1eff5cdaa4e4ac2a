//! Evaluates the shape-calculus kernels of the three built-in motions and
//! checks `m′` against a finite difference of `det ∇φ_t`.
use stshapeopt::kernel::{rotation, KernelPoint};
use stshapeopt::motion::{determinant, Identity, Mat, Motion, Point, Polynomial1D, Rotation2D};

fn main() {
    let poly = Polynomial1D::new(1.0);
    let (t, x) = (0.3, 0.55);
    let kp = KernelPoint::<1>::new(&poly, t, &Point::<1>::new(x)).unwrap();
    println!("polynomial motion at (t, x) = ({t}, {x}): y = {:.6}, G = {:.6}", kp.y[0], kp.g[(0, 0)]);

    // θ(y) = sin(πy): pick the value and slope at y and contract every kernel.
    let theta = Point::<1>::new((std::f64::consts::PI * kp.y[0]).sin());
    let dtheta = Mat::<1>::new(std::f64::consts::PI * (std::f64::consts::PI * kp.y[0]).cos());
    println!("  m'    = {:+.6e}", kp.m_prime().value(&theta, &dtheta));
    println!("  F'_xx = {:+.6e}", kp.fxx_prime()[0][0].value(&theta, &dtheta));
    println!("  F'_xt = {:+.6e}", kp.fxt_prime()[0].value(&theta, &dtheta));
    println!("  b'    = {:+.6e}", kp.b_prime()[0].value(&theta, &dtheta));
    println!("  A'    = {:+.6e}", kp.a_prime()[0][0].value(&theta, &dtheta));

    // m′ is the derivative of the Jacobian of x ↦ φ_t(φ_t⁻¹(x) + εθ).
    let eps = 1e-6;
    let jac = |e: f64| {
        let y = kp.y[0] + e * (std::f64::consts::PI * kp.y[0]).sin();
        let dy = 1.0 + e * dtheta[(0, 0)];
        determinant(&poly.grad(t, &Point::<1>::new(y))) * dy / kp.g[(0, 0)]
    };
    println!("  FD of the Jacobian: {:+.6e}", (jac(eps) - jac(-eps)) / (2.0 * eps));

    let rot = Rotation2D::new(2.0);
    let x2 = Point::<2>::new(0.4, -0.2);
    let kp2 = KernelPoint::<2>::new(&rot, 0.7, &x2).unwrap();
    let th2 = Point::<2>::new(0.3, 0.1);
    let g2 = Mat::<2>::new(0.2, -0.5, 0.7, 0.1);
    let generic = stshapeopt::kernel::contract_matrix(&kp2.fxx_prime(), &th2, &g2);
    let closed = rotation::fxx_prime(&rot, 0.7, &g2);
    println!("rotation: |F'_xx generic - closed form| = {:.2e}", (generic - closed).norm());

    let id = Identity::<2>::new(1.0);
    let kp3 = KernelPoint::<2>::new(&id, 0.5, &x2).unwrap();
    println!("identity: m' = div θ = {:+.3}", kp3.m_prime().value(&th2, &g2));
}
