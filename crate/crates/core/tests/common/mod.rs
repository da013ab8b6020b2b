//! Helpers shared by the integration tests.

#![allow(dead_code)]

use std::path::Path;

/// Contents of a legacy ASCII POLYDATA file.
#[derive(Debug, Default)]
pub struct VtkPolyData {
    pub title: String,
    pub points: Vec<[f64; 3]>,
    pub polygons: Vec<Vec<usize>>,
    pub lines: Vec<Vec<usize>>,
    pub scalars: Vec<f64>,
}

/// Minimal reader for the files the crate writes: POINTS, POLYGONS or
/// LINES, and an optional single `SCALARS` block.
pub fn parse_vtk(text: &str) -> VtkPolyData {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# vtk DataFile Version 3.0"));
    let mut out = VtkPolyData {
        title: lines.next().expect("title").to_string(),
        ..Default::default()
    };
    assert_eq!(lines.next(), Some("ASCII"));
    assert_eq!(lines.next(), Some("DATASET POLYDATA"));
    let mut tokens = lines.flat_map(str::split_whitespace);
    let mut next = || tokens.next().expect("unexpected end of file");
    let count = |s: &str| s.parse::<usize>().expect("count");
    let real = |s: &str| s.parse::<f64>().expect("real");
    loop {
        let keyword = next();
        match keyword {
            "POINTS" => {
                let n = count(next());
                assert_eq!(next(), "double");
                out.points = (0..n)
                    .map(|_| [real(next()), real(next()), real(next())])
                    .collect();
            }
            "POLYGONS" | "LINES" => {
                let cells = count(next());
                let total = count(next());
                let mut read = 0;
                let mut list = Vec::with_capacity(cells);
                for _ in 0..cells {
                    let len = count(next());
                    list.push((0..len).map(|_| count(next())).collect::<Vec<_>>());
                    read += 1 + len;
                }
                assert_eq!(read, total, "{keyword} size field");
                if keyword == "LINES" {
                    out.lines = list;
                    return out;
                }
                out.polygons = list;
            }
            "POINT_DATA" => {
                let n = count(next());
                assert_eq!([next(), next(), next()], ["SCALARS", "u", "double"]);
                assert_eq!(next(), "1");
                assert_eq!([next(), next()], ["LOOKUP_TABLE", "default"]);
                out.scalars = (0..n).map(|_| real(next())).collect();
                return out;
            }
            other => panic!("unexpected keyword {other}"),
        }
    }
}

pub fn read_vtk(path: &Path) -> VtkPolyData {
    parse_vtk(&std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display())))
}
