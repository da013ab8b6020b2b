//! Per-vertex finite-volume cells built from incircle tangent lengths.
//!
//! Around vertex `i` with ring `i_1..i_Υ`, the cell is bounded by segments
//! perpendicular to each edge `E_j = (i, i_j)` at the common distance `d`
//! from `i`, where `d` is the smallest incircle tangent length at `i` over
//! the ring triangles. Inside `T_j` the two perpendiculars meet on the angle
//! bisector, so each one has length `d·tan(θ_j/2)`. Because `d` never
//! exceeds a tangent length the cell stays inside the star, also for obtuse
//! triangles.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{SurfaceMesh, TriangleGeom, Vec3, VertexStar, DEGENERACY_RATIO};

/// Geometric weights of one control volume.
///
/// Index `j` runs over the ring. `h_left[j]` is the boundary piece
/// perpendicular to `E_j` inside `T_{j-1}`, `h_right[j]` the one inside
/// `T_j`; `sector_area[j]` is the part of the cell in `T_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlVolumeGeom {
    pub d: f64,
    pub edge_len: Vec<f64>,
    pub h_left: Vec<f64>,
    pub h_right: Vec<f64>,
    pub sector_area: Vec<f64>,
    pub total_area: f64,
}

impl ControlVolumeGeom {
    /// `(h_left[j] + h_right[j]) / |E_j|`.
    pub fn edge_weight(&self, j: usize) -> f64 {
        (self.h_left[j] + self.h_right[j]) / self.edge_len[j]
    }
}

/// Distance from `tri[vertex]` to the incircle contact point on either
/// adjacent side: `(b + c − a) / 2`.
pub fn incircle_tangent_length(tri: [Vec3; 3], vertex: usize) -> Result<f64> {
    let p = tri[vertex % 3];
    let q = tri[(vertex + 1) % 3];
    let r = tri[(vertex + 2) % 3];
    let b = (q - p).norm();
    let c = (r - p).norm();
    let a = (r - q).norm();
    let twice_area = (q - p).cross(r - p).norm();
    let diam = a.max(b).max(c);
    if !(0.5 * twice_area >= DEGENERACY_RATIO * diam * diam) || diam == 0.0 {
        return Err(Error::DegenerateTriangle(usize::MAX));
    }
    Ok(0.5 * (b + c - a))
}

/// `tan(θ/2)` of the angle at `p` between `u = q − p` and `v = r − p`.
fn tan_half_angle(u: Vec3, v: Vec3) -> f64 {
    u.cross(v).norm() / (u.norm() * v.norm() + u.dot(v))
}

pub fn build_control_volume(
    mesh: &SurfaceMesh,
    geo: &[TriangleGeom],
    star: &VertexStar,
) -> Result<ControlVolumeGeom> {
    let n = star.valence();
    let xi = mesh.position(star.center);
    let mut d = f64::INFINITY;
    let mut edge_len = Vec::with_capacity(n);
    let mut tan_half = Vec::with_capacity(n);
    for j in 0..n {
        let t = star.ring_tris[j];
        let pj = mesh.position(star.ring[j]);
        let pk = mesh.position(star.next(j));
        if geo[t].area <= 0.0 {
            return Err(Error::DegenerateTriangle(t));
        }
        let dj =
            incircle_tangent_length([xi, pj, pk], 0).map_err(|_| Error::DegenerateTriangle(t))?;
        d = d.min(dj);
        edge_len.push((pj - xi).norm());
        tan_half.push(tan_half_angle(pj - xi, pk - xi));
    }
    let h_right: Vec<f64> = tan_half.iter().map(|&th| d * th).collect();
    let h_left: Vec<f64> = (0..n).map(|j| d * tan_half[(j + n - 1) % n]).collect();
    let sector_area: Vec<f64> = (0..n)
        .map(|j| 0.5 * d * (h_right[j] + h_left[(j + 1) % n]))
        .collect();
    let total_area = (0..n).map(|j| 0.5 * d * (h_left[j] + h_right[j])).sum();
    Ok(ControlVolumeGeom {
        d,
        edge_len,
        h_left,
        h_right,
        sector_area,
        total_area,
    })
}

/// Control volumes of every vertex of `mesh`.
pub fn all_control_volumes(
    mesh: &SurfaceMesh,
    geo: &[TriangleGeom],
) -> Result<Vec<ControlVolumeGeom>> {
    mesh.stars()
        .par_iter()
        .map(|s| build_control_volume(mesh, geo, s))
        .collect()
}

/// Above this value of `max h_T / d` the monotonicity constants are
/// considered degraded.
pub const DIAMETER_RATIO_WARNING: f64 = 50.0;
/// Below this value of `min (h_L + h_R) / |E|` the artificial viscosity on an
/// edge is considered negligible.
pub const EDGE_RATIO_WARNING: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq)]
pub struct CvRatioReport {
    pub min_edge_ratio: f64,
    pub max_edge_ratio: f64,
    pub max_diameter_over_d: f64,
    pub warnings: Vec<String>,
}

pub fn cv_ratio_report(mesh: &SurfaceMesh) -> Result<CvRatioReport> {
    let geo = crate::geometry::all_triangle_geometry(mesh)?;
    let cvs = all_control_volumes(mesh, &geo)?;
    let mut report = CvRatioReport {
        min_edge_ratio: f64::INFINITY,
        max_edge_ratio: 0.0,
        max_diameter_over_d: 0.0,
        warnings: Vec::new(),
    };
    for (star, cv) in mesh.stars().iter().zip(&cvs) {
        for j in 0..star.valence() {
            let r = cv.edge_weight(j);
            report.min_edge_ratio = report.min_edge_ratio.min(r);
            report.max_edge_ratio = report.max_edge_ratio.max(r);
            let q = geo[star.ring_tris[j]].diameter / cv.d;
            report.max_diameter_over_d = report.max_diameter_over_d.max(q);
        }
    }
    if report.max_diameter_over_d > DIAMETER_RATIO_WARNING {
        report.warnings.push(format!(
            "max h_T/d = {:.3e} exceeds {DIAMETER_RATIO_WARNING}; monotonicity constants degrade",
            report.max_diameter_over_d
        ));
    }
    if report.min_edge_ratio < EDGE_RATIO_WARNING {
        report.warnings.push(format!(
            "min (h_L+h_R)/|E| = {:.3e} is below {EDGE_RATIO_WARNING}",
            report.min_edge_ratio
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{icosphere, nonacute_sphere};
    use std::f64::consts::PI;

    #[test]
    fn tangent_length_345() {
        let t = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(3.0, 0.0, 0.0),
            Vec3::new(0.0, 4.0, 0.0),
        ];
        assert!((incircle_tangent_length(t, 0).unwrap() - 1.0).abs() < 1e-15);
        // (3 + 5 − 4) / 2 at the vertex between the sides of length 3 and 5
        assert!((incircle_tangent_length(t, 1).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn tangent_length_equilateral() {
        let t = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.5, 3f64.sqrt() / 2.0, 0.0),
        ];
        for v in 0..3 {
            assert!((incircle_tangent_length(t, v).unwrap() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_tangent_length() {
        let t = [
            Vec3::ZERO,
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
        ];
        assert!(incircle_tangent_length(t, 0).is_err());
    }

    /// Flat mesh: a hexagonal star of equilateral triangles closed by a
    /// mirrored copy slightly below, so the mesh is watertight.
    pub(crate) fn hexagon_pillow(side: f64) -> SurfaceMesh {
        let mut pos = vec![Vec3::ZERO];
        for k in 0..6 {
            let a = PI / 3.0 * k as f64;
            pos.push(Vec3::new(side * a.cos(), side * a.sin(), 0.0));
        }
        pos.push(Vec3::new(0.0, 0.0, -0.5 * side));
        let mut tris = Vec::new();
        for k in 0..6 {
            let a = 1 + k;
            let b = 1 + (k + 1) % 6;
            tris.push([0, a, b]);
            tris.push([7, b, a]);
        }
        SurfaceMesh::new(pos, tris).unwrap()
    }

    #[test]
    fn hexagonal_star_closed_form() {
        let mesh = hexagon_pillow(1.0);
        let geo = crate::geometry::all_triangle_geometry(&mesh).unwrap();
        let cv = build_control_volume(&mesh, &geo, &mesh.stars()[0]).unwrap();
        let h = 0.5 * (PI / 6.0).tan();
        assert!((cv.d - 0.5).abs() < 1e-15);
        for j in 0..6 {
            assert!((cv.h_left[j] - h).abs() < 1e-15);
            assert!((cv.h_right[j] - h).abs() < 1e-15);
        }
        assert!((cv.total_area - 3f64.sqrt() / 2.0).abs() < 1e-12);
        let s: f64 = cv.sector_area.iter().sum();
        assert!((s - cv.total_area).abs() < 1e-12);
    }

    #[test]
    fn halving_scales_exactly() {
        let big = hexagon_pillow(1.0);
        let small = hexagon_pillow(0.5);
        let cv = |m: &SurfaceMesh| {
            let g = crate::geometry::all_triangle_geometry(m).unwrap();
            build_control_volume(m, &g, &m.stars()[0]).unwrap()
        };
        let (a, b) = (cv(&big), cv(&small));
        assert!((b.d - 0.5 * a.d).abs() < 1e-15);
        assert!((b.total_area - 0.25 * a.total_area).abs() < 1e-15);
        for j in 0..6 {
            assert!((b.h_left[j] - 0.5 * a.h_left[j]).abs() < 1e-15);
            assert!((b.sector_area[j] - 0.25 * a.sector_area[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn regular_tetrahedron_star() {
        let s = 1.0 / (2.0 * 2f64.sqrt());
        let pos = vec![
            Vec3::new(s, s, s),
            Vec3::new(s, -s, -s),
            Vec3::new(-s, s, -s),
            Vec3::new(-s, -s, s),
        ];
        let mut tris = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
        for t in &mut tris {
            let [a, b, c] = t.map(|i| pos[i]);
            if (b - a).cross(c - a).dot(a + b + c) < 0.0 {
                t.swap(1, 2);
            }
        }
        let mesh = SurfaceMesh::new(pos, tris).unwrap();
        let geo = crate::geometry::all_triangle_geometry(&mesh).unwrap();
        for star in mesh.stars() {
            assert_eq!(star.valence(), 3);
            let cv = build_control_volume(&mesh, &geo, star).unwrap();
            assert!((cv.d - 0.5).abs() < 1e-14);
            let h = 0.5 * (PI / 6.0).tan();
            assert!(cv
                .h_left
                .iter()
                .chain(&cv.h_right)
                .all(|&x| (x - h).abs() < 1e-14));
            assert!(cv
                .sector_area
                .iter()
                .all(|&a| (a - cv.sector_area[0]).abs() < 1e-14));
            let sum: f64 = cv.sector_area.iter().sum();
            assert!((sum - cv.total_area).abs() < 1e-14);
        }
    }

    #[test]
    fn uniform_icosahedron_ratios() {
        let r = cv_ratio_report(&icosphere(0).unwrap()).unwrap();
        assert!((r.max_edge_ratio - r.min_edge_ratio).abs() < 1e-12);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn nonacute_sphere_ratio_is_finite() {
        let r = cv_ratio_report(&nonacute_sphere(2).unwrap()).unwrap();
        assert!(r.max_diameter_over_d.is_finite() && r.max_diameter_over_d > 1.0);
        assert!(r.min_edge_ratio > 0.0);
    }

    #[test]
    fn needle_triangle_triggers_warning() {
        let mesh = icosphere(1).unwrap();
        let before = cv_ratio_report(&mesh).unwrap();
        // slide one vertex almost onto a neighbor
        let star = &mesh.stars()[0];
        let target = mesh.position(star.ring[0]);
        let mut pos = mesh.positions().to_vec();
        pos[0] = target + (pos[0] - target) * 1e-3;
        let needle = mesh.with_positions(pos, 0.0).unwrap();
        let after = cv_ratio_report(&needle).unwrap();
        assert!(after.max_diameter_over_d > 10.0 * before.max_diameter_over_d);
        assert!(!after.warnings.is_empty());
    }
}
