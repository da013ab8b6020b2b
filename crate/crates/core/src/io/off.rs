//! OFF triangle meshes: `OFF`, a `V F E` count line, vertex lines, then
//! face lines `3 a b c`. `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{SurfaceMesh, Vec3};

fn bad(msg: String) -> Error {
    Error::InvalidMesh(format!("OFF: {msg}"))
}

struct Tokens<'a> {
    items: Vec<&'a str>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str> {
        let tok = self
            .items
            .get(self.pos)
            .ok_or_else(|| bad(format!("missing {what}")))?;
        self.pos += 1;
        Ok(tok)
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let tok = self.next(what)?;
        tok.parse()
            .map_err(|_| bad(format!("invalid {what} '{tok}'")))
    }
}

pub fn parse_off(text: &str) -> Result<SurfaceMesh> {
    let mut tokens = Tokens {
        items: text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace)
            .collect(),
        pos: 0,
    };
    match tokens.next("header")? {
        "OFF" => {}
        other => return Err(bad(format!("expected 'OFF' header, found '{other}'"))),
    }
    let nv: usize = tokens.parse("vertex count")?;
    let nf: usize = tokens.parse("face count")?;
    let _edges: usize = tokens.parse("edge count")?;
    let mut positions = Vec::with_capacity(nv);
    for i in 0..nv {
        let mut c = [0.0; 3];
        for v in &mut c {
            *v = tokens.parse(&format!("coordinate of vertex {i}"))?;
        }
        positions.push(Vec3::from_array(c));
    }
    let mut triangles = Vec::with_capacity(nf);
    for f in 0..nf {
        let n: usize = tokens.parse("face size")?;
        if n != 3 {
            return Err(bad(format!(
                "face {f} has {n} vertices; only triangles are supported"
            )));
        }
        triangles.push([
            tokens.parse("face index")?,
            tokens.parse("face index")?,
            tokens.parse("face index")?,
        ]);
    }
    SurfaceMesh::new(positions, triangles)
}

pub fn read_off(path: &Path) -> Result<SurfaceMesh> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_off(&text)
}

pub fn format_off(mesh: &SurfaceMesh) -> String {
    let mut out = String::from("OFF\n");
    let _ = writeln!(
        out,
        "{} {} {}",
        mesh.vertex_count(),
        mesh.triangle_count(),
        mesh.edges().len()
    );
    for p in mesh.positions() {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    out
}
