mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::parse_vtk;
use surfhj::calculus::{interpolate, NodalField};
use surfhj::geometry::{icosphere, nonacute_sphere, SurfaceMesh};
use surfhj::io::{
    extract_levelset, format_off, format_polylines_vtk, format_vtk_frame, parse_expr, parse_off,
};
use surfhj::surfaces::{example2_initial_mesh, example2_level_function};

fn random_field(mesh: &SurfaceMesh, seed: u64) -> NodalField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..mesh.vertex_count())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    NodalField::new(mesh, values).unwrap()
}

#[test]
fn vtk_frame_round_trips_bit_exactly() {
    for mesh in [icosphere(2).unwrap(), nonacute_sphere(1).unwrap()] {
        let field = random_field(&mesh, 7);
        let back = parse_vtk(&format_vtk_frame(&mesh, &field).unwrap());
        assert_eq!(back.points.len(), mesh.vertex_count());
        for (p, q) in back.points.iter().zip(mesh.positions()) {
            assert_eq!(*p, q.to_array());
        }
        let tris: Vec<Vec<usize>> = mesh.triangles().iter().map(|t| t.to_vec()).collect();
        assert_eq!(back.polygons, tris);
        assert_eq!(back.scalars, field.values());
    }
}

#[test]
fn level_lines_of_random_fields_are_closed() {
    for (k, mesh) in [
        icosphere(2).unwrap(),
        icosphere(3).unwrap(),
        nonacute_sphere(2).unwrap(),
    ]
    .iter()
    .enumerate()
    {
        for seed in 0..20 {
            let field = random_field(mesh, 100 * k as u64 + seed);
            for r in [-0.5, 0.0, 0.3] {
                let lines = extract_levelset(mesh, &field, r).unwrap();
                assert!(lines.iter().all(|l| l.closed && l.points.len() >= 3));
                let vtk = parse_vtk(&format_polylines_vtk(&lines, 0.0));
                assert_eq!(vtk.lines.len(), lines.len());
                for cell in &vtk.lines {
                    assert_eq!(cell.first(), cell.last());
                }
            }
        }
    }
}

#[test]
fn nodal_values_on_the_level_are_nudged() {
    let mesh = icosphere(2).unwrap();
    let field = interpolate(&parse_expr("x3").unwrap(), &mesh).unwrap();
    // icosahedron vertices (±1, ±φ, 0) and their subdivisions lie on x3 = 0
    assert!(field.values().iter().filter(|&&v| v == 0.0).count() >= 4);
    let lines = extract_levelset(&mesh, &field, 0.0).unwrap();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|l| l.closed));
}

#[test]
fn example_two_initial_data_has_two_curves() {
    let u0 = parse_expr("(x3 + 0.3)*(x3 - 0.1) - 0.3").unwrap();
    for level in [3, 4] {
        let mesh = example2_initial_mesh(level).unwrap();
        assert!(mesh
            .positions()
            .iter()
            .all(|&x| example2_level_function(x).abs() < 1e-9));
        let field = interpolate(&u0, &mesh).unwrap();
        let lines = extract_levelset(&mesh, &field, 0.0).unwrap();
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| l.closed));
    }
}

#[test]
fn off_round_trip_preserves_mesh() {
    for mesh in [
        icosphere(1).unwrap(),
        nonacute_sphere(1).unwrap(),
        example2_initial_mesh(2).unwrap(),
    ] {
        let back = parse_off(&format_off(&mesh)).unwrap();
        assert_eq!(back.positions(), mesh.positions());
        assert_eq!(back.triangles(), mesh.triangles());
    }
}
