use super::{Adjacency, TriangleMesh};
use crate::geom::Vec3;

/// Polygon of the dual mesh surrounding one primal vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFace {
    /// Dual vertices (primal triangles) in counter-clockwise order.
    pub cycle: Vec<usize>,
    /// False for primal boundary vertices, whose dual polygon is open.
    pub closed: bool,
}

/// Dual grid: one vertex per primal triangle (at its centroid), one edge per
/// interior primal edge.
#[derive(Debug, Clone)]
pub struct DualMesh {
    pub dual_vertices: Vec<Vec3>,
    /// `(t, u)` with `t < u`, in order of first primal triangle.
    pub dual_edges: Vec<[usize; 2]>,
    /// Per dual vertex, neighbors across primal edges 0, 1, 2 (counter-clockwise).
    pub dual_fans: Vec<[Option<usize>; 3]>,
    /// One dual face per primal vertex.
    pub dual_faces: Vec<DualFace>,
    /// Primal vertex indices of each triangle; the dual faces incident to a dual vertex.
    pub incident_faces: Vec<[usize; 3]>,
    /// Outward unit normal of each primal triangle.
    pub normals: Vec<Vec3>,
}

impl DualMesh {
    pub fn vertex_count(&self) -> usize {
        self.dual_vertices.len()
    }

    /// Whether the dual fan of `dv` is closed and all three surrounding dual
    /// faces are closed polygons.
    pub fn is_interior(&self, dv: usize) -> bool {
        self.dual_fans[dv].iter().all(Option::is_some)
            && self.incident_faces[dv]
                .iter()
                .all(|&f| self.dual_faces[f].closed)
    }

    /// Surface area of a dual face, as a fan of triangles about its vertex mean.
    pub fn face_area(&self, f: usize) -> f64 {
        let cycle = &self.dual_faces[f].cycle;
        if cycle.len() < 3 {
            return 0.0;
        }
        let pts: Vec<Vec3> = cycle.iter().map(|&d| self.dual_vertices[d]).collect();
        let mid = pts.iter().sum::<Vec3>() / pts.len() as f64;
        let m = pts.len();
        (0..m)
            .map(|i| 0.5 * (pts[i] - mid).cross(&(pts[(i + 1) % m] - mid)).norm())
            .sum()
    }
}

pub fn build_dual_mesh(mesh: &TriangleMesh, adj: &Adjacency) -> DualMesh {
    let nt = mesh.triangle_count();
    let dual_vertices: Vec<Vec3> = (0..nt).map(|t| mesh.centroid(t)).collect();
    let dual_fans: Vec<[Option<usize>; 3]> = (0..nt).map(|t| adj.edge_neighbors(t)).collect();

    let mut dual_edges = Vec::with_capacity(adj.interior_edge_count());
    for (t, fan) in dual_fans.iter().enumerate() {
        for u in fan.iter().flatten() {
            if t < *u {
                dual_edges.push([t, *u]);
            }
        }
    }

    let dual_faces = (0..mesh.vertex_count())
        .map(|v| DualFace {
            cycle: adj.vertex_fan(v).to_vec(),
            closed: adj.is_interior_vertex(v),
        })
        .collect();

    DualMesh {
        dual_vertices,
        dual_edges,
        dual_fans,
        dual_faces,
        incident_faces: mesh.triangles().to_vec(),
        normals: mesh.normals(),
    }
}
