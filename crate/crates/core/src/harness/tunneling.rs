use super::scene::{Obstacle, World};
use crate::detect::point_on_triangle;
use crate::error::{Error, Result};
use crate::geom::{Tri, Vec3};
use crate::mesh::{build_adjacency, TriangleMesh};

/// Skewed so that rays rarely graze mesh edges or vertices.
const RAY: Vec3 = Vec3::new(
    0.577_350_269_189_625_8,
    0.577_350_269_189_625_7,
    0.577_350_269_189_626,
);

/// Strict interior test against one obstacle; points on the surface are outside.
pub fn inside(obstacle: &Obstacle, p: &Vec3, meshes: &[TriangleMesh]) -> bool {
    match obstacle {
        Obstacle::Sphere { center, radius } => (p - center).norm_squared() < radius * radius,
        Obstacle::HalfSpace { point, normal } => (p - point).dot(normal) < 0.0,
        Obstacle::Mesh { object } => inside_closed_mesh(&meshes[*object], p),
    }
}

/// Ray-parity test. The mesh must be closed.
pub fn inside_closed_mesh(mesh: &TriangleMesh, p: &Vec3) -> bool {
    let tris = (0..mesh.triangle_count()).map(|t| mesh.triangle(t));
    let mut crossings = 0usize;
    for tri in tris {
        if point_on_triangle(p, &tri) {
            return false;
        }
        if ray_hits(p, &RAY, &tri) {
            crossings += 1;
        }
    }
    crossings % 2 == 1
}

fn ray_hits(origin: &Vec3, dir: &Vec3, tri: &Tri) -> bool {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let h = dir.cross(&e2);
    let det = e1.dot(&h);
    if det.abs() < 1e-15 {
        return false;
    }
    let s = origin - tri[0];
    let u = s.dot(&h) / det;
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) / det;
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    e2.dot(&q) / det > 0.0
}

/// Free (non-pinned) particles strictly inside any obstacle. A mesh
/// obstacle's own vertices are not tested against it.
pub fn tunneling_check(world: &World) -> Result<usize> {
    for o in &world.obstacles {
        if let Obstacle::Mesh { object } = o {
            if !build_adjacency(&world.meshes[*object])?.is_closed() {
                return Err(Error::OpenObstacle(*object));
            }
        }
    }
    Ok(count_tunneled(world))
}

/// [`tunneling_check`] without re-validating mesh obstacles.
pub(crate) fn count_tunneled(world: &World) -> usize {
    let state = &world.state;
    let mut count = 0;
    for (obj, &base) in world.offsets.iter().enumerate() {
        let range = base..base + world.meshes[obj].vertex_count();
        for (p, &w) in state.positions[range.clone()]
            .iter()
            .zip(&state.inv_mass[range])
        {
            if w == 0.0 {
                continue;
            }
            let hit = world.obstacles.iter().any(|o| match o {
                Obstacle::Mesh { object } if *object == obj => false,
                _ => inside(o, p, &world.meshes),
            });
            count += usize::from(hit);
        }
    }
    count
}
