use super::{SurfaceMesh, Vec3};
use crate::error::{Error, Result};

/// Triangles with `area < DEGENERACY_RATIO * diameter²` are rejected.
pub const DEGENERACY_RATIO: f64 = 1e-14;

/// Per-triangle geometric quantities of a flat triangle in R³.
///
/// `basis_gradients[a]` is the in-plane gradient of the linear nodal basis
/// function that is 1 at vertex `a` and 0 at the other two. The normal
/// follows the vertex order (right-hand rule); the gradients do not depend
/// on it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleGeom {
    pub normal: Vec3,
    pub area: f64,
    pub diameter: f64,
    pub inradius: f64,
    pub vertex_angles: [f64; 3],
    pub basis_gradients: [Vec3; 3],
}

impl TriangleGeom {
    pub fn from_points(p: [Vec3; 3]) -> Result<Self> {
        let e = [p[2] - p[1], p[0] - p[2], p[1] - p[0]]; // e[a] is opposite vertex a
        let len = [e[0].norm(), e[1].norm(), e[2].norm()];
        let diameter = len[0].max(len[1]).max(len[2]);
        let n = e[2].cross(-e[1]);
        let twice_area = n.norm();
        let area = 0.5 * twice_area;
        if !(area >= DEGENERACY_RATIO * diameter * diameter) || diameter == 0.0 {
            return Err(Error::DegenerateTriangle(usize::MAX));
        }
        let normal = n / twice_area;
        let basis_gradients = [
            normal.cross(e[0]) / twice_area,
            normal.cross(e[1]) / twice_area,
            normal.cross(e[2]) / twice_area,
        ];
        let angle = |a: usize| {
            let u = p[(a + 1) % 3] - p[a];
            let v = p[(a + 2) % 3] - p[a];
            u.cross(v).norm().atan2(u.dot(v))
        };
        Ok(TriangleGeom {
            normal,
            area,
            diameter,
            inradius: twice_area / (len[0] + len[1] + len[2]),
            vertex_angles: [angle(0), angle(1), angle(2)],
            basis_gradients,
        })
    }

    /// Ratio `h_K / ρ_K`.
    pub fn shape_ratio(&self) -> f64 {
        self.diameter / self.inradius
    }

    pub fn is_obtuse(&self) -> bool {
        self.vertex_angles
            .iter()
            .any(|&a| a > std::f64::consts::FRAC_PI_2)
    }
}

pub fn triangle_geometry(mesh: &SurfaceMesh, tri: usize) -> Result<TriangleGeom> {
    TriangleGeom::from_points(mesh.triangle_points(tri)).map_err(|_| Error::DegenerateTriangle(tri))
}

/// Geometry of every triangle of `mesh`.
pub fn all_triangle_geometry(mesh: &SurfaceMesh) -> Result<Vec<TriangleGeom>> {
    use rayon::prelude::*;
    (0..mesh.triangle_count())
        .into_par_iter()
        .map(|t| triangle_geometry(mesh, t))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshQuality {
    pub h_max: f64,
    pub h_min: f64,
    pub min_edge: f64,
    pub max_ratio: f64,
}

pub fn mesh_quality(mesh: &SurfaceMesh) -> MeshQuality {
    let mut q = MeshQuality {
        h_max: 0.0,
        h_min: f64::INFINITY,
        min_edge: mesh.min_edge_length(),
        max_ratio: 0.0,
    };
    for t in 0..mesh.triangle_count() {
        let [a, b, c] = mesh.triangle_points(t);
        let l = [(b - c).norm(), (c - a).norm(), (a - b).norm()];
        let diam = l[0].max(l[1]).max(l[2]);
        let inradius = (b - a).cross(c - a).norm() / (l[0] + l[1] + l[2]);
        q.h_max = q.h_max.max(diam);
        q.h_min = q.h_min.min(diam);
        q.max_ratio = q.max_ratio.max(diam / inradius);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn equilateral() -> [Vec3; 3] {
        [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.5, 3f64.sqrt() / 2.0, 0.0),
        ]
    }

    #[test]
    fn equilateral_closed_forms() {
        let g = TriangleGeom::from_points(equilateral()).unwrap();
        assert!((g.area - 3f64.sqrt() / 4.0).abs() < 1e-15);
        assert!((g.inradius - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
        for a in g.vertex_angles {
            assert!((a - PI / 3.0).abs() < 1e-14);
        }
        assert!((g.normal - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn right_triangle_345() {
        let g = TriangleGeom::from_points([
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(3.0, 0.0, 0.0),
            Vec3::new(0.0, 4.0, 0.0),
        ])
        .unwrap();
        assert!((g.inradius - 1.0).abs() < 1e-14);
        assert_eq!(g.diameter, 5.0);
        assert!((g.vertex_angles[0] - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn basis_gradients_are_nodal() {
        let p = [
            Vec3::new(0.1, -0.3, 0.7),
            Vec3::new(1.2, 0.4, 0.2),
            Vec3::new(-0.2, 0.9, 1.1),
        ];
        let g = TriangleGeom::from_points(p).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let expected = if a == b { 0.0 } else { -1.0 };
                let got = g.basis_gradients[a].dot(p[b] - p[a]);
                assert!((got - expected).abs() < 1e-12, "a={a} b={b} got {got}");
            }
            assert!(g.basis_gradients[a].dot(g.normal).abs() < 1e-12);
        }
        let sum = g.basis_gradients[0] + g.basis_gradients[1] + g.basis_gradients[2];
        assert!(sum.norm() < 1e-10 / g.inradius);
        let angle_sum: f64 = g.vertex_angles.iter().sum();
        assert!((angle_sum - PI).abs() < 1e-10);
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let p = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(2.0, 2.0, 2.0),
        ];
        assert!(matches!(
            TriangleGeom::from_points(p),
            Err(Error::DegenerateTriangle(_))
        ));
    }

    #[test]
    fn reversed_winding_keeps_gradients() {
        let p = equilateral();
        let g = TriangleGeom::from_points(p).unwrap();
        let r = TriangleGeom::from_points([p[0], p[2], p[1]]).unwrap();
        assert!((g.normal + r.normal).norm() < 1e-15);
        assert!((g.basis_gradients[1] - r.basis_gradients[2]).norm() < 1e-14);
    }
}
