//! Tabulates the saturating reluctivity curve and its bounds, then evaluates
//! the air-gap torque density on an annulus for a rotating field.
use stshapeopt::materials::{arkkio_torque, reluctivity, ArkkioParams, CurveParams, PlanarMesh, ReluctivityLaw};

fn main() {
    let iron = CurveParams::iron();
    let law = ReluctivityLaw::Curve(iron);
    println!("{:>10} {:>14} {:>14} {:>14}", "|B|", "nu", "s nu' + nu", "nu'");
    for s in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
        let (nu, dnu) = reluctivity(s, &law).unwrap();
        println!("{s:>10.2} {nu:>14.4} {:>14.4} {dnu:>14.4}", law.tangent(s));
    }
    println!("lower bound {:.1}, upper bound {:.1}, Lipschitz constant {:.1}", law.nu_lower(), law.nu_upper(), law.lipschitz_constant());

    // A rotating field whose radial and tangential components are out of
    // phase, so the gap carries a net torque.
    let mesh = PlanarMesh::annulus(0.9, 1.0, 4, 64);
    let period = 1.0;
    let snapshots: Vec<(f64, Vec<f64>)> = (0..=8)
        .map(|k| {
            let t = k as f64 / 8.0 * period;
            let w = 2.0 * std::f64::consts::PI * t / period;
            (t, mesh.nodes.iter().map(|p| {
                let (r, a) = (p.norm(), p.y.atan2(p.x) - w);
                r * a.sin() + 0.3 * r * r * a.cos()
            }).collect())
        })
        .collect();
    let params = ArkkioParams { r_rotor: 0.9, r_stator: 1.0, length: 1.0, nu_a: 1.0, period };
    println!("torque of the rotating field: {:.6e}", arkkio_torque(&mesh, &snapshots, &params).unwrap());
}
