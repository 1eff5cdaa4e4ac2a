//! The extra shape-derivative terms of a magnetization carried by the moving
//! inclusion, assembled as densities and contracted directly.
use stshapeopt::fem::Field;
use stshapeopt::functions::FnField;
use stshapeopt::mesh::{generate_1d_example_mesh, SpatialField, INNER_PHASE};
use stshapeopt::motion::Polynomial1D;
use stshapeopt::shape::{magnetization_supplement, magnetization_supplement_direct};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let motion = Polynomial1D::new(1.0);
    let mesh = generate_1d_example_mesh(40, 20, &[0.4, 0.6], &motion)?;
    let l = FnField::new(|t: f64, x: f64| 1.0 + 0.5 * (6.0 * x + t).sin(), |t: f64, x: f64| 3.0 * (6.0 * x + t).cos());
    // Any adjoint-like field will do for the comparison.
    let p = Field::interpolate(&mesh, |t, x| (std::f64::consts::PI * x).sin() * (1.0 + t * x));
    let densities = magnetization_supplement(&mesh, &motion, &l, &[INNER_PHASE], &p)?;
    for (k, theta) in [|x: f64| x * (1.0 - x), |x: f64| (3.0 * x).sin() * (1.0 - x)].iter().enumerate() {
        let th = SpatialField::from_fn(&mesh.spatial, theta);
        let paired = densities.pair(&mesh.spatial, &th)?;
        let direct = magnetization_supplement_direct(&mesh, &motion, &l, &[INNER_PHASE], &p, &th)?;
        println!("θ_{k}: densities {paired:+.12e}  direct {direct:+.12e}  rel. diff {:.1e}", ((paired - direct) / direct).abs());
    }
    Ok(())
}
