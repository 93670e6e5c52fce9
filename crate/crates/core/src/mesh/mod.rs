//! Triangle meshes, adjacency, dual meshes and discrete curvature.

mod adjacency;
mod curvature;
mod dual;
mod io;
pub mod shapes;

pub use adjacency::{build_adjacency, Adjacency};
pub use curvature::{
    angle_deficit, angle_deficit_curvature, curvature_field, curvature_field_with,
    triangle_curvature, CurvatureField,
};
pub use dual::{build_dual_mesh, DualFace, DualMesh};
pub use io::{load_mesh, parse_mesh, write_mesh};

use crate::error::{Error, Result};
use crate::geom::{self, Tri, Vec3};

/// Triangles at or below this area (m²) are rejected as degenerate.
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

/// Opaque identifier of a simulated object; doubles as its index in a world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ObjectId(pub usize);

/// Indexed triangle surface. Counter-clockwise winding defines the outward normal.
///
/// Construction validates indices and rejects degenerate triangles. Vertex
/// positions may be rewritten afterwards (the surface deforms); the topology
/// is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    object_id: ObjectId,
}

impl TriangleMesh {
    pub fn new(
        vertices: Vec<Vec3>,
        triangles: Vec<[usize; 3]>,
        object_id: ObjectId,
    ) -> Result<Self> {
        let n = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&v) = tri.iter().find(|&&v| v >= n) {
                return Err(Error::IndexOutOfRange {
                    triangle: t,
                    vertex: v,
                    vertex_count: n,
                });
            }
            let area = geom::area(&[vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]]);
            if !(area > MIN_TRIANGLE_AREA) {
                return Err(Error::DegenerateTriangle { triangle: t, area });
            }
        }
        Ok(TriangleMesh {
            vertices,
            triangles,
            object_id,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn vertices_mut(&mut self) -> &mut [Vec3] {
        &mut self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn object_id(&self) -> ObjectId {
        self.object_id
    }

    pub fn set_object_id(&mut self, id: ObjectId) {
        self.object_id = id;
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    #[inline]
    pub fn triangle(&self, t: usize) -> Tri {
        let [i, j, k] = self.triangles[t];
        [self.vertices[i], self.vertices[j], self.vertices[k]]
    }

    pub fn normal(&self, t: usize) -> Vec3 {
        geom::unit_normal(&self.triangle(t))
    }

    pub fn normals(&self) -> Vec<Vec3> {
        (0..self.triangles.len()).map(|t| self.normal(t)).collect()
    }

    pub fn area(&self, t: usize) -> f64 {
        geom::area(&self.triangle(t))
    }

    pub fn centroid(&self, t: usize) -> Vec3 {
        geom::centroid(&self.triangle(t))
    }

    pub fn bbox_diagonal(&self) -> f64 {
        geom::bbox_diagonal(&self.vertices)
    }

    /// Applies `f` to every vertex position.
    pub fn transform(&mut self, f: impl Fn(&Vec3) -> Vec3) {
        for v in &mut self.vertices {
            *v = f(v);
        }
    }

    /// Unique undirected edges `(min, max)` in first-seen order.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let e = [a.min(b), a.max(b)];
                if seen.insert(e) {
                    out.push(e);
                }
            }
        }
        out
    }

    /// True when the two triangles share at least one vertex.
    pub fn share_vertex(&self, a: usize, b: usize) -> bool {
        let (ta, tb) = (&self.triangles[a], &self.triangles[b]);
        ta.iter().any(|v| tb.contains(v))
    }
}
