//! Triangulated surfaces, their motion, and per-triangle geometry.

mod builders;
mod evolving;
mod mesh;
mod triangle;
mod vec3;

pub use builders::{icosphere, nonacute_sphere, MAX_LEVEL};
pub use evolving::{AnalyticFlow, EvolvingSurface, FlowMap, FnVelocity, VelocityField};
pub use mesh::{build_star_topology, MeshEpoch, SurfaceMesh, Topology, VertexStar};
pub use triangle::{
    all_triangle_geometry, mesh_quality, triangle_geometry, MeshQuality, TriangleGeom,
    DEGENERACY_RATIO,
};
pub use vec3::Vec3;
