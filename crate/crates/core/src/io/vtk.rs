//! Legacy ASCII VTK output. Reals use 17 significant digits so every double
//! round-trips.

use std::fmt::Write as _;
use std::path::Path;

use super::levelset::Polyline;
use crate::calculus::NodalField;
use crate::error::{Error, Result};
use crate::geometry::{SurfaceMesh, Vec3};

fn real(out: &mut String, v: f64) {
    let _ = write!(out, "{v:.16e}");
}

fn point(out: &mut String, p: Vec3) {
    real(out, p.x);
    out.push(' ');
    real(out, p.y);
    out.push(' ');
    real(out, p.z);
    out.push('\n');
}

/// POLYDATA with triangles and the nodal field as `SCALARS u`.
pub fn format_vtk_frame(mesh: &SurfaceMesh, field: &NodalField) -> Result<String> {
    field.check_mesh(mesh)?;
    let m = mesh.vertex_count();
    let k = mesh.triangle_count();
    let mut out = String::with_capacity(80 * (m + k));
    out.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(out, "surfhj t={:.16e}", mesh.time());
    out.push_str("ASCII\nDATASET POLYDATA\n");
    let _ = writeln!(out, "POINTS {m} double");
    for &p in mesh.positions() {
        point(&mut out, p);
    }
    let _ = writeln!(out, "POLYGONS {k} {}", 4 * k);
    for t in mesh.triangles() {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(out, "POINT_DATA {m}");
    out.push_str("SCALARS u double 1\nLOOKUP_TABLE default\n");
    for &v in field.values() {
        real(&mut out, v);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_vtk_frame(mesh: &SurfaceMesh, field: &NodalField, path: &Path) -> Result<()> {
    let text = format_vtk_frame(mesh, field)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// POLYDATA with one `LINES` cell per polyline; closed polylines repeat
/// their first point index at the end.
pub fn format_polylines_vtk(polylines: &[Polyline], time: f64) -> String {
    let n: usize = polylines.iter().map(|p| p.points.len()).sum();
    let cells: usize = polylines
        .iter()
        .map(|p| 1 + p.points.len() + usize::from(p.closed))
        .sum();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(out, "surfhj level set t={time:.16e}");
    out.push_str("ASCII\nDATASET POLYDATA\n");
    let _ = writeln!(out, "POINTS {n} double");
    for p in polylines {
        for &x in &p.points {
            point(&mut out, x);
        }
    }
    let _ = writeln!(out, "LINES {} {cells}", polylines.len());
    let mut base = 0;
    for p in polylines {
        let len = p.points.len();
        let _ = write!(out, "{}", len + usize::from(p.closed));
        for i in 0..len {
            let _ = write!(out, " {}", base + i);
        }
        if p.closed {
            let _ = write!(out, " {base}");
        }
        out.push('\n');
        base += len;
    }
    out
}

pub fn write_polylines_vtk(polylines: &[Polyline], time: f64, path: &Path) -> Result<()> {
    std::fs::write(path, format_polylines_vtk(polylines, time)).map_err(|e| Error::io(path, e))
}
