//! Builds a space-time mesh that follows φ_t(ξ) = ξ + tξ², moves its
//! interfaces, and writes it to VTK.
use stshapeopt::io::{write_vtk, ScalarData};
use stshapeopt::mesh::{generate_1d_example_mesh, SpatialField};
use stshapeopt::motion::Polynomial1D;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let motion = Polynomial1D::new(1.0);
    let mesh = generate_1d_example_mesh(20, 10, &[0.4, 0.6], &motion)?;
    mesh.check_invariants(&motion)?;
    println!("{} vertices, {} triangles, |Q| = {:.6}", mesh.n_vertices(), mesh.n_elements(), mesh.volume());
    println!("periodic pairs: {}", mesh.periodic_pairs.len());

    // Push the left interface outwards; larger steps eventually invert cells.
    let theta = SpatialField::from_fn(&mesh.spatial, |x| (1.0 - ((x - 0.4) / 0.15).abs()).max(0.0));
    for tau in [0.05, 0.2, 0.5] {
        match mesh.deformed(&motion, &theta, -tau) {
            Ok(m) => println!("tau = {tau}: interfaces at {:?}", m.spatial.interfaces().iter().map(|p| p.xi).collect::<Vec<_>>()),
            Err(e) => println!("tau = {tau}: rejected ({e})"),
        }
    }

    let dir = std::env::temp_dir().join("stshapeopt_examples");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("mesh.vtk");
    let phase: Vec<f64> = mesh.elements.iter().map(|e| f64::from(e.phase)).collect();
    let xi: Vec<f64> = mesh.reference.iter().map(|r| r[1]).collect();
    write_vtk(&path, &mesh, "space-time mesh", &[ScalarData::new("xi", &xi)], &[ScalarData::new("phase", &phase)])?;
    println!("wrote {}", path.display());
    Ok(())
}
