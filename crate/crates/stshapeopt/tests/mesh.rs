//! Space-time mesh generation, deformation and trajectory traversal.
mod common;

use stshapeopt::mesh::{
    generate_1d_example_mesh, generate_1d_mesh, vertical_line_elements, BoundaryTag, MeshError, MeshSpec, SpatialField,
    INNER_PHASE, OUTER_PHASE,
};
use stshapeopt::motion::{Identity, Motion, Polynomial1D};

#[test]
fn identity_mesh_is_the_reference_rectangle() {
    let m = Identity::<1>::new(1.0);
    let mesh = generate_1d_example_mesh(10, 4, &[0.4, 0.6], &m).unwrap();
    assert_eq!(mesh.n_elements(), 2 * 10 * 4);
    assert_eq!(mesh.n_vertices(), 11 * 5);
    assert_eq!(mesh.periodic_pairs.len(), 11);
    assert!((mesh.volume() - 1.0).abs() < 1e-14);
    for (e, el) in mesh.elements.iter().enumerate() {
        let xs: Vec<f64> = el.vertices.iter().map(|&v| mesh.reference[v][1]).collect();
        let inside = xs.iter().all(|&x| (0.4 - 1e-14..=0.6 + 1e-14).contains(&x));
        assert_eq!(el.phase == INNER_PHASE, inside, "element {e}");
        assert!(mesh.signed_area(e) > 0.0);
    }
    mesh.check_invariants(&m).unwrap();
}

#[test]
fn polynomial_mesh_follows_the_motion() {
    let m = Polynomial1D::new(1.0);
    let mesh = generate_1d_example_mesh(10, 4, &[0.4, 0.6], &m).unwrap();
    let top_right = mesh.vertex_index(4, 10);
    assert_eq!(mesh.vertices[top_right], [1.0, 2.0]);
    // |Q| = ∫₀¹ (φ_t(1) − φ_t(0)) dt = 3/2.
    assert!((mesh.volume() - 1.5).abs() < 1e-12);
    mesh.check_invariants(&m).unwrap();
    for &(b, t) in &mesh.periodic_pairs {
        assert_eq!(mesh.reference[b][1], mesh.reference[t][1]);
    }
    let counts = |tag| mesh.boundary.iter().filter(|f| f.tag == tag).count();
    assert_eq!((counts(BoundaryTag::Lateral), counts(BoundaryTag::Bottom), counts(BoundaryTag::Top)), (8, 10, 10));
}

#[test]
fn counts_follow_the_structured_grid() {
    let m = Polynomial1D::new(1.0);
    for (nx, nt) in [(4, 2), (7, 3), (20, 11)] {
        let mesh = generate_1d_example_mesh(nx, nt, &[0.5], &m).unwrap();
        assert_eq!(mesh.n_vertices(), (nx + 1) * (nt + 1));
        assert_eq!(mesh.periodic_pairs.len(), nx + 1);
    }
}

#[test]
fn invalid_interfaces_are_rejected() {
    let m = Identity::<1>::new(1.0);
    assert!(matches!(generate_1d_example_mesh(10, 4, &[0.0, 0.5], &m), Err(MeshError::Geometry(_))));
    assert!(matches!(generate_1d_example_mesh(10, 4, &[0.5, 0.5], &m), Err(MeshError::Geometry(_))));
    assert!(matches!(generate_1d_example_mesh(10, 4, &[0.6, 0.4], &m), Err(MeshError::Geometry(_))));
    assert!(matches!(generate_1d_example_mesh(10, 4, &[0.41, 0.43], &m), Err(MeshError::Geometry(_))));
    assert!(generate_1d_example_mesh(3, 4, &[0.5], &m).is_err());
    let spec = MeshSpec { n_x: 10, n_t: 4, interfaces: vec![0.3], phases: Some(vec![INNER_PHASE, OUTER_PHASE]) };
    let mesh = generate_1d_mesh(&spec, &m).unwrap();
    assert_eq!(mesh.spatial.phases[0], INNER_PHASE);
}

#[test]
fn deformation_moves_reference_nodes() {
    let m = Polynomial1D::new(1.0);
    let mesh = generate_1d_example_mesh(10, 4, &[0.4, 0.6], &m).unwrap();
    let zero = SpatialField::zeros(11);
    assert_eq!(mesh.deformed(&m, &zero, 0.3).unwrap(), mesh);
    let theta = SpatialField::from_fn(&mesh.spatial, |x| x * (1.0 - x));
    let tau = 0.1;
    let moved = mesh.deformed(&m, &theta, tau).unwrap();
    moved.check_invariants(&m).unwrap();
    for (v, p) in moved.vertices.iter().enumerate() {
        let (t, xi0) = (mesh.reference[v][0], mesh.reference[v][1]);
        let expected = Polynomial1D::map(t, xi0 + tau * xi0 * (1.0 - xi0));
        assert!((p[1] - expected).abs() < 1e-14);
    }
    assert_eq!(moved.periodic_pairs, mesh.periodic_pairs);
    assert_eq!(moved.elements, mesh.elements);
    let back = moved.deformed(&m, &SpatialField { values: theta.values.iter().map(|v| -v).collect() }, tau).unwrap();
    // θ is attached to the nodes, so the reverse step undoes the first.
    for (a, b) in back.vertices.iter().zip(&mesh.vertices) {
        assert!((a[1] - b[1]).abs() < 1e-12);
    }
}

#[test]
fn identity_deformation_is_a_shift() {
    let m = Identity::<1>::new(1.0);
    let mesh = generate_1d_example_mesh(10, 4, &[0.4, 0.6], &m).unwrap();
    let mut theta = SpatialField::from_fn(&mesh.spatial, |_| 1.0);
    theta.values[0] = 0.0;
    theta.values[10] = 0.0;
    let moved = mesh.deformed(&m, &theta, 0.01).unwrap();
    for (v, p) in moved.vertices.iter().enumerate() {
        let i = v % 11;
        let shift = if i == 0 || i == 10 { 0.0 } else { 0.01 };
        assert!((p[1] - mesh.vertices[v][1] - shift).abs() < 1e-15);
    }
}

#[test]
fn deformation_errors() {
    let m = Polynomial1D::new(1.0);
    let mesh = generate_1d_example_mesh(10, 4, &[0.4, 0.6], &m).unwrap();
    let theta = SpatialField::from_fn(&mesh.spatial, |x| x);
    assert!(matches!(mesh.deformed(&m, &theta, 0.1), Err(MeshError::BoundaryMoved { node: 10, .. })));
    let spike = SpatialField::from_fn(&mesh.spatial, |x| if (x - 0.5).abs() < 1e-9 { 1.0 } else { 0.0 });
    assert!(matches!(mesh.deformed(&m, &spike, 0.5), Err(MeshError::InvertedElement { .. })));
    assert!(mesh.deformed(&m, &SpatialField::zeros(3), 0.1).is_err());
}

#[test]
fn vertical_lines_cross_two_triangles_per_slab() {
    let m = Identity::<1>::new(1.0);
    let mesh = generate_1d_example_mesh(10, 6, &[0.4, 0.6], &m).unwrap();
    let segs = vertical_line_elements(&mesh, &m, 0.437).unwrap();
    assert_eq!(segs.len(), 2 * 6);
    assert_eq!(segs[0].t0, 0.0);
    assert_eq!(segs.last().unwrap().t1, 1.0);
    for w in segs.windows(2) {
        assert!((w[0].t1 - w[1].t0).abs() < 1e-14);
    }
    // Along the lateral boundary the start is nudged inwards.
    let edge = vertical_line_elements(&mesh, &m, 0.0).unwrap();
    assert!(!edge.is_empty());
    assert!(vertical_line_elements(&mesh, &m, 1.5).is_err());
}

#[test]
fn polynomial_trajectory_stays_in_the_mesh() {
    let m = Polynomial1D::new(1.0);
    let mesh = generate_1d_example_mesh(16, 8, &[0.4, 0.6], &m).unwrap();
    let segs = vertical_line_elements(&mesh, &m, 0.5).unwrap();
    let total: f64 = segs.iter().map(|s| s.t1 - s.t0).sum();
    assert!((total - 1.0).abs() < 1e-12);
    for s in &segs {
        let tm = 0.5 * (s.t0 + s.t1);
        let p = [tm, 0.5 + 0.25 * tm];
        let l = mesh.geometry(s.element).barycentric(p);
        assert!(l.iter().all(|&c| c > -1e-9), "segment {s:?} misses the trajectory");
    }
    let _ = m.period();
}
