use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use super::triangle::TriangleGeom;
use super::Vec3;
use crate::error::{Error, Result};

static NEXT_TOPOLOGY_ID: AtomicU64 = AtomicU64::new(1);

/// Ordered one-ring around a vertex.
///
/// `ring_tris[j]` is the triangle `(center, ring[j], ring[j + 1])` with the
/// index taken cyclically, and its winding agrees with the mesh winding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexStar {
    pub center: usize,
    pub ring: Vec<usize>,
    pub ring_tris: Vec<usize>,
}

impl VertexStar {
    pub fn valence(&self) -> usize {
        self.ring.len()
    }

    /// Neighbor following `ring[j]` in cyclic order.
    #[inline]
    pub fn next(&self, j: usize) -> usize {
        self.ring[(j + 1) % self.ring.len()]
    }
}

/// Build the vertex stars of a closed, consistently oriented triangle mesh.
pub fn build_star_topology(
    triangles: &[[usize; 3]],
    vertex_count: usize,
) -> Result<Vec<VertexStar>> {
    for (t, tri) in triangles.iter().enumerate() {
        if tri.iter().any(|&v| v >= vertex_count) {
            return Err(Error::InvalidMesh(format!(
                "triangle {t} references a vertex outside 0..{vertex_count}"
            )));
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(Error::InvalidMesh(format!("triangle {t} repeats a vertex")));
        }
    }

    // directed edge -> number of occurrences
    let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 3);
    for tri in triangles {
        for k in 0..3 {
            *directed.entry((tri[k], tri[(k + 1) % 3])).or_insert(0) += 1;
        }
    }
    let mut edges: Vec<(usize, usize)> = directed
        .keys()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    for (a, b) in edges {
        let ab = directed.get(&(a, b)).copied().unwrap_or(0);
        let ba = directed.get(&(b, a)).copied().unwrap_or(0);
        match ab + ba {
            1 => return Err(Error::OpenBoundary(a, b)),
            2 if ab == 1 => {}
            2 => return Err(Error::InconsistentWinding(a, b)),
            n => return Err(Error::NonManifold(a, b, n)),
        }
    }

    // per-vertex fans: (a, b, triangle) with the triangle rotated to (center, a, b)
    let mut fans: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); vertex_count];
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            fans[tri[k]].push((tri[(k + 1) % 3], tri[(k + 2) % 3], t));
        }
    }

    let mut stars = Vec::with_capacity(vertex_count);
    for (center, fan) in fans.iter().enumerate() {
        if fan.len() < 3 {
            return Err(if fan.is_empty() {
                Error::InvalidMesh(format!("vertex {center} is not used by any triangle"))
            } else {
                Error::NonManifoldVertex(center)
            });
        }
        let next: HashMap<usize, (usize, usize)> =
            fan.iter().map(|&(a, b, t)| (a, (b, t))).collect();
        let start = fan[0].0;
        let mut ring = Vec::with_capacity(fan.len());
        let mut ring_tris = Vec::with_capacity(fan.len());
        let mut a = start;
        loop {
            let &(b, t) = next.get(&a).ok_or(Error::NonManifoldVertex(center))?;
            ring.push(a);
            ring_tris.push(t);
            a = b;
            if a == start || ring.len() > fan.len() {
                break;
            }
        }
        if ring.len() != fan.len() || a != start {
            return Err(Error::NonManifoldVertex(center));
        }
        stars.push(VertexStar {
            center,
            ring,
            ring_tris,
        });
    }
    Ok(stars)
}

/// Connectivity shared by every time level of an evolving mesh.
#[derive(Debug)]
pub struct Topology {
    id: u64,
    triangles: Vec<[usize; 3]>,
    stars: Vec<VertexStar>,
    /// Reference positions at t = 0, used for Lagrangian velocity fields.
    origins: Vec<Vec3>,
}

/// Identifies one time level of one mesh family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MeshEpoch {
    topology: u64,
    time_bits: u64,
}

/// A closed, oriented triangulated surface at one time level.
#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    time: f64,
    positions: Vec<Vec3>,
    topology: Arc<Topology>,
}

impl SurfaceMesh {
    /// Build a mesh at `t = 0`; the given positions become the reference
    /// configuration.
    pub fn new(positions: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        let stars = build_star_topology(&triangles, positions.len())?;
        for (t, tri) in triangles.iter().enumerate() {
            TriangleGeom::from_points([positions[tri[0]], positions[tri[1]], positions[tri[2]]])
                .map_err(|_| Error::DegenerateTriangle(t))?;
        }
        let topology = Topology {
            id: NEXT_TOPOLOGY_ID.fetch_add(1, Ordering::Relaxed),
            triangles,
            stars,
            origins: positions.clone(),
        };
        Ok(SurfaceMesh {
            time: 0.0,
            positions,
            topology: Arc::new(topology),
        })
    }

    /// Same connectivity, new vertex positions at time `time`.
    pub fn with_positions(&self, positions: Vec<Vec3>, time: f64) -> Result<Self> {
        if positions.len() != self.positions.len() {
            return Err(Error::InvalidMesh(format!(
                "expected {} positions, got {}",
                self.positions.len(),
                positions.len()
            )));
        }
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(SurfaceMesh {
            time,
            positions,
            topology: Arc::clone(&self.topology),
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> Vec3 {
        self.positions[i]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.topology.triangles
    }

    pub fn stars(&self) -> &[VertexStar] {
        &self.topology.stars
    }

    pub fn origins(&self) -> &[Vec3] {
        &self.topology.origins
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.topology.triangles.len()
    }

    pub fn triangle_points(&self, tri: usize) -> [Vec3; 3] {
        let [a, b, c] = self.topology.triangles[tri];
        [self.positions[a], self.positions[b], self.positions[c]]
    }

    pub fn epoch(&self) -> MeshEpoch {
        MeshEpoch {
            topology: self.topology.id,
            time_bits: self.time.to_bits(),
        }
    }

    /// Whether `other` shares this mesh's connectivity.
    pub fn same_topology(&self, other: &SurfaceMesh) -> bool {
        Arc::ptr_eq(&self.topology, &other.topology)
    }

    /// Each undirected edge once, as `(lo, hi)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .triangles()
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .filter(|&(a, b)| a < b)
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn min_edge_length(&self) -> f64 {
        self.triangles()
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(a, b)| (self.positions[a] - self.positions[b]).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetrahedron() -> Vec<[usize; 3]> {
        vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]]
    }

    #[test]
    fn tetrahedron_stars_have_three_neighbors() {
        let stars = build_star_topology(&tetrahedron(), 4).unwrap();
        assert!(stars.iter().all(|s| s.valence() == 3));
    }

    #[test]
    fn ring_follows_winding() {
        let tris = tetrahedron();
        let stars = build_star_topology(&tris, 4).unwrap();
        for s in &stars {
            for j in 0..s.valence() {
                let t = tris[s.ring_tris[j]];
                let k = t.iter().position(|&v| v == s.center).unwrap();
                assert_eq!(t[(k + 1) % 3], s.ring[j]);
                assert_eq!(t[(k + 2) % 3], s.next(j));
            }
        }
    }

    #[test]
    fn missing_face_is_open_boundary() {
        let mut tris = tetrahedron();
        tris.pop();
        assert!(matches!(
            build_star_topology(&tris, 4),
            Err(Error::OpenBoundary(..))
        ));
    }

    #[test]
    fn flipped_face_is_inconsistent() {
        let mut tris = tetrahedron();
        tris[0] = [0, 1, 2];
        assert!(matches!(
            build_star_topology(&tris, 4),
            Err(Error::InconsistentWinding(..))
        ));
    }

    #[test]
    fn doubled_face_is_non_manifold() {
        let mut tris = tetrahedron();
        tris.push([0, 2, 1]);
        tris.push([0, 1, 2]);
        assert!(matches!(
            build_star_topology(&tris, 4),
            Err(Error::NonManifold(..))
        ));
    }

    #[test]
    fn two_tetrahedra_sharing_a_vertex_are_pinched() {
        let mut tris = tetrahedron();
        tris.extend([[0, 5, 4], [0, 4, 6], [4, 5, 6], [0, 6, 5]]);
        assert!(matches!(
            build_star_topology(&tris, 7),
            Err(Error::NonManifoldVertex(0))
        ));
    }
}
