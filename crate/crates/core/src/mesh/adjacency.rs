use std::collections::HashMap;

use super::TriangleMesh;
use crate::error::{Error, Result};

/// Edge and vertex adjacency of a triangle mesh.
#[derive(Debug, Clone)]
pub struct Adjacency {
    /// Neighbor across local edge `k` = `(tri[k], tri[k+1])`, if any.
    edge_neighbors: Vec<[Option<usize>; 3]>,
    /// Incident triangles of each vertex, ordered counter-clockwise around it.
    vertex_fans: Vec<Vec<usize>>,
    fan_closed: Vec<bool>,
    interior_edges: usize,
    boundary_edges: usize,
}

impl Adjacency {
    pub fn edge_neighbors(&self, t: usize) -> [Option<usize>; 3] {
        self.edge_neighbors[t]
    }

    /// Edge-adjacent triangles of `t` (at most three).
    pub fn tri_neighbors(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        self.edge_neighbors[t].iter().flatten().copied()
    }

    pub fn vertex_fan(&self, v: usize) -> &[usize] {
        &self.vertex_fans[v]
    }

    /// A vertex is interior when its fan is a closed cycle.
    pub fn is_interior_vertex(&self, v: usize) -> bool {
        self.fan_closed[v]
    }

    pub fn interior_edge_count(&self) -> usize {
        self.interior_edges
    }

    pub fn boundary_edge_count(&self) -> usize {
        self.boundary_edges
    }

    /// Closed surface: every edge is shared by exactly two triangles.
    pub fn is_closed(&self) -> bool {
        self.boundary_edges == 0
    }
}

pub fn build_adjacency(mesh: &TriangleMesh) -> Result<Adjacency> {
    let tris = mesh.triangles();
    let mut edges: HashMap<[usize; 2], Vec<(usize, usize)>> =
        HashMap::with_capacity(tris.len() * 2);
    for (t, tri) in tris.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            edges.entry([a.min(b), a.max(b)]).or_default().push((t, k));
        }
    }

    let mut edge_neighbors = vec![[None; 3]; tris.len()];
    let (mut interior_edges, mut boundary_edges) = (0, 0);
    // Walk triangles in order so error reporting is deterministic.
    for tri in tris {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = [a.min(b), a.max(b)];
            let users = &edges[&key];
            match users.as_slice() {
                [_] => {}
                [(t0, k0), (t1, k1)] => {
                    edge_neighbors[*t0][*k0] = Some(*t1);
                    edge_neighbors[*t1][*k1] = Some(*t0);
                }
                _ => {
                    return Err(Error::NonManifoldEdge {
                        a: key[0],
                        b: key[1],
                        count: users.len(),
                    })
                }
            }
        }
    }
    for users in edges.values() {
        if users.len() == 2 {
            interior_edges += 1;
        } else {
            boundary_edges += 1;
        }
    }

    // (triangle, vertex after v, vertex before v) for every corner at v.
    let mut corners: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); mesh.vertex_count()];
    for (t, tri) in tris.iter().enumerate() {
        for p in 0..3 {
            corners[tri[p]].push((t, tri[(p + 1) % 3], tri[(p + 2) % 3]));
        }
    }

    let mut vertex_fans = Vec::with_capacity(corners.len());
    let mut fan_closed = Vec::with_capacity(corners.len());
    for inc in &corners {
        let (fan, closed) = order_fan(inc);
        vertex_fans.push(fan);
        fan_closed.push(closed);
    }

    Ok(Adjacency {
        edge_neighbors,
        vertex_fans,
        fan_closed,
        interior_edges,
        boundary_edges,
    })
}

fn order_fan(inc: &[(usize, usize, usize)]) -> (Vec<usize>, bool) {
    if inc.is_empty() {
        return (Vec::new(), false);
    }
    // A corner with no predecessor starts an open fan.
    let start = inc
        .iter()
        .position(|c| !inc.iter().any(|d| d.2 == c.1))
        .unwrap_or(0);
    let open = inc.iter().any(|c| !inc.iter().any(|d| d.2 == c.1));

    let mut visited = vec![false; inc.len()];
    let mut fan = Vec::with_capacity(inc.len());
    let mut cur = start;
    loop {
        visited[cur] = true;
        fan.push(inc[cur].0);
        let before = inc[cur].2;
        match (0..inc.len()).find(|&j| !visited[j] && inc[j].1 == before) {
            Some(j) => cur = j,
            None => break,
        }
    }
    let mut closed = !open && fan.len() == inc.len() && inc[start].1 == inc[cur].2;
    // Inconsistently oriented neighborhoods: keep every triangle, but never call it closed.
    for (j, c) in inc.iter().enumerate() {
        if !visited[j] {
            fan.push(c.0);
            closed = false;
        }
    }
    (fan, closed)
}
