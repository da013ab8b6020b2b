//! Iso-lines of a piecewise linear field.

use std::collections::HashMap;

use crate::calculus::NodalField;
use crate::error::{Error, Result};
use crate::geometry::{SurfaceMesh, Vec3};

#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    /// For closed polylines the first point is not repeated.
    pub points: Vec<Vec3>,
    pub closed: bool,
}

/// Relative size of the shift applied to nodal values equal to the level.
pub const LEVEL_NUDGE: f64 = 1e-13;

/// Polylines of `{u = r}` on the piecewise linear surface.
///
/// Each triangle whose vertex values straddle `r` contributes one segment
/// joining the linear crossings on its two cut edges; segments sharing a cut
/// edge are joined. Nodal values exactly equal to `r` are first raised by
/// `LEVEL_NUDGE` times the field range, so no contour passes through a
/// vertex.
pub fn extract_levelset(mesh: &SurfaceMesh, field: &NodalField, r: f64) -> Result<Vec<Polyline>> {
    field.check_mesh(mesh)?;
    let range = field.max() - field.min();
    let nudge = if range > 0.0 {
        LEVEL_NUDGE * range
    } else {
        LEVEL_NUDGE
    };
    let phi: Vec<f64> = field
        .values()
        .iter()
        .map(|&u| if u == r { u - r + nudge } else { u - r })
        .collect();

    let crossing = |a: usize, b: usize| -> Vec3 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let s = phi[a] / (phi[a] - phi[b]);
        let (xa, xb) = (mesh.position(a), mesh.position(b));
        xa + (xb - xa) * s
    };

    // segment k joins cut edges ends[k][0] and ends[k][1]
    let mut ends: Vec<[(usize, usize); 2]> = Vec::new();
    for tri in mesh.triangles() {
        let mut cut = [(0, 0); 2];
        let mut n = 0;
        for e in 0..3 {
            let (a, b) = (tri[e], tri[(e + 1) % 3]);
            if (phi[a] < 0.0) != (phi[b] < 0.0) {
                if n < 2 {
                    cut[n] = (a.min(b), a.max(b));
                }
                n += 1;
            }
        }
        if n == 2 {
            ends.push(cut);
        }
    }

    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (k, seg) in ends.iter().enumerate() {
        for &e in seg {
            by_edge.entry(e).or_default().push(k);
        }
    }
    // on a closed mesh both triangles at a cut edge are cut, so every
    // segment end is shared by exactly two segments and all loops close
    if let Some((&(a, b), segs)) = by_edge.iter().find(|(_, segs)| segs.len() != 2) {
        return Err(Error::InvalidMesh(format!(
            "edge ({a}, {b}) is an end of {} level-set segments",
            segs.len()
        )));
    }

    let mut used = vec![false; ends.len()];
    let mut polylines = Vec::new();
    for start in 0..ends.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let first_edge = ends[start][0];
        let mut points = vec![crossing(first_edge.0, first_edge.1)];
        let mut edge = ends[start][1];
        while edge != first_edge {
            points.push(crossing(edge.0, edge.1));
            let next = by_edge[&edge]
                .iter()
                .copied()
                .find(|&k| !used[k])
                .expect("two segments per cut edge");
            used[next] = true;
            edge = if ends[next][0] == edge {
                ends[next][1]
            } else {
                ends[next][0]
            };
        }
        polylines.push(Polyline {
            points,
            closed: true,
        });
    }
    Ok(polylines)
}
