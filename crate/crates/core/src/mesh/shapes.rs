//! Procedural meshes: icospheres and square grids.

use std::collections::HashMap;

use super::{ObjectId, TriangleMesh};
use crate::geom::Vec3;

/// Which side of a grid its outward normal points to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Facing {
    #[default]
    Up,
    Down,
}

/// Subdivided icosahedron with all vertices on a sphere of `radius`.
///
/// `V = 10·4ⁿ + 2`, `F = 20·4ⁿ`, `E = 30·4ⁿ`.
pub fn icosphere(subdivisions: u32, radius: f64) -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vec3>| -> usize {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }

    for v in &mut verts {
        *v *= radius;
    }
    TriangleMesh::new(verts, faces, ObjectId::default()).expect("icosphere is well formed")
}

/// `n × n` vertex grid of side `size`, centered at the origin in the XZ plane.
///
/// Produces `2·(n−1)²` triangles. Vertex `(row, col)` has index `row·n + col`,
/// with rows along +Z and columns along +X.
pub fn grid(n: usize, size: f64, facing: Facing) -> TriangleMesh {
    assert!(n >= 2, "grid needs at least 2 vertices per side");
    let step = size / (n - 1) as f64;
    let half = size / 2.0;
    let mut verts = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            verts.push(Vec3::new(
                col as f64 * step - half,
                0.0,
                row as f64 * step - half,
            ));
        }
    }
    let mut tris = Vec::with_capacity(2 * (n - 1) * (n - 1));
    for row in 0..n - 1 {
        for col in 0..n - 1 {
            let i = row * n + col;
            let (a, b, c, d) = (i, i + 1, i + n, i + n + 1);
            // With +X right and +Z toward the viewer, (a, c, b) winds counter-clockwise seen from +Y.
            match facing {
                Facing::Up => tris.extend_from_slice(&[[a, c, b], [b, c, d]]),
                Facing::Down => tris.extend_from_slice(&[[a, b, c], [b, d, c]]),
            }
        }
    }
    TriangleMesh::new(verts, tris, ObjectId::default()).expect("grid is well formed")
}

/// Indices of the four corner vertices of an `n × n` grid.
pub fn grid_corners(n: usize) -> [usize; 4] {
    [0, n - 1, n * (n - 1), n * n - 1]
}
