//! Closed sphere meshes used by the built-in problems.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::{SurfaceMesh, TriangleGeom, Vec3};
use crate::error::{Error, Result};

pub const MAX_LEVEL: usize = 8;

/// Subdivided icosahedron on the unit sphere: `10·4^level + 2` vertices,
/// `20·4^level` outward-oriented triangles.
pub fn icosphere(level: usize) -> Result<SurfaceMesh> {
    if level > MAX_LEVEL {
        return Err(Error::LevelTooLarge {
            level,
            max: MAX_LEVEL,
        });
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ]
    .into_iter()
    .map(|p| Vec3::from_array(p).normalized())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..level {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut split = |a: usize, b: usize, verts: &mut Vec<Vec3>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalized());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = split(a, b, &mut vertices);
            let bc = split(b, c, &mut vertices);
            let ca = split(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    SurfaceMesh::new(vertices, faces)
}

/// Latitude–longitude triangulation of the unit sphere.
///
/// `4·2^level` latitude bands and twice as many meridians; each quad is cut
/// along the same diagonal, which produces obtuse triangles in the bands
/// near the poles. At least 10% of the triangles are obtuse.
pub fn nonacute_sphere(level: usize) -> Result<SurfaceMesh> {
    if level > MAX_LEVEL {
        return Err(Error::LevelTooLarge {
            level,
            max: MAX_LEVEL,
        });
    }
    let bands = 4usize << level;
    let meridians = 2 * bands;
    let point = |theta: f64, phi: f64| {
        Vec3::new(
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        )
    };

    let mut vertices = vec![Vec3::new(0.0, 0.0, 1.0)];
    for k in 1..bands {
        let theta = PI * k as f64 / bands as f64;
        for m in 0..meridians {
            vertices.push(point(theta, 2.0 * PI * m as f64 / meridians as f64));
        }
    }
    vertices.push(Vec3::new(0.0, 0.0, -1.0));
    let south = vertices.len() - 1;
    let ring = |k: usize, m: usize| 1 + (k - 1) * meridians + m % meridians;

    let mut faces = Vec::with_capacity(2 * bands * meridians);
    for m in 0..meridians {
        faces.push([0, ring(1, m), ring(1, m + 1)]);
    }
    for k in 1..bands - 1 {
        for m in 0..meridians {
            let (a, b) = (ring(k, m), ring(k, m + 1));
            let (c, d) = (ring(k + 1, m), ring(k + 1, m + 1));
            faces.push([a, c, d]);
            faces.push([a, d, b]);
        }
    }
    for m in 0..meridians {
        faces.push([south, ring(bands - 1, m + 1), ring(bands - 1, m)]);
    }

    for f in &mut faces {
        let [a, b, c] = f.map(|i| vertices[i]);
        if (b - a).cross(c - a).dot(a + b + c) < 0.0 {
            f.swap(1, 2);
        }
    }
    let mesh = SurfaceMesh::new(vertices, faces)?;

    let obtuse = (0..mesh.triangle_count())
        .filter(|&t| {
            TriangleGeom::from_points(mesh.triangle_points(t))
                .map(|g| g.is_obtuse())
                .unwrap_or(false)
        })
        .count();
    if 10 * obtuse < mesh.triangle_count() {
        return Err(Error::InvalidMesh(format!(
            "non-acute sphere level {level} has only {obtuse} obtuse triangles"
        )));
    }
    Ok(mesh)
}
