//! Configuration, expressions, mesh and frame files, level-set extraction.

pub mod config;
pub mod expr;
pub mod levelset;
pub mod off;
pub mod vtk;

pub use config::{load_config, parse_config, InitialData, MeshSource, OutputFormat, RunConfig};
pub use expr::{parse_expr, Expr, ExprSolution, ExprVector};
pub use levelset::{extract_levelset, Polyline};
pub use off::{format_off, parse_off, read_off};
pub use vtk::{format_polylines_vtk, format_vtk_frame, write_polylines_vtk, write_vtk_frame};
