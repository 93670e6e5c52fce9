//! Comparison methods: per-triangle bounding balls and exact polygon intersection.

use super::{
    ball_contact, enumerate_pairs, exact_tri_tri, Ball, CandidatePair, NarrowOutcome, TriRef,
};
use crate::exec::Exec;
use crate::geom::{self, Tri};
use crate::mesh::TriangleMesh;
use crate::sphere::circumcenter;

/// Smallest ball containing a triangle: the longest edge's diametral ball
/// when the triangle is right or obtuse, the circumscribed ball otherwise.
pub fn min_bounding_sphere(tri: &Tri) -> Ball {
    for i in 0..3 {
        let (a, b, c) = (tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]);
        if (b - a).dot(&(c - a)) <= 0.0 {
            return Ball {
                center: (b + c) * 0.5,
                radius: 0.5 * (c - b).norm(),
            };
        }
    }
    match circumcenter(&tri[0], &tri[1], &tri[2]) {
        Ok((center, radius)) => Ball { center, radius },
        // Only reachable for near-collinear input that passed the dot tests.
        Err(_) => {
            let (i, _) = (0..3)
                .map(|i| (i, (tri[(i + 1) % 3] - tri[(i + 2) % 3]).norm()))
                .fold((0, 0.0), |m, x| if x.1 > m.1 { x } else { m });
            let (b, c) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
            Ball {
                center: (b + c) * 0.5,
                radius: 0.5 * (c - b).norm(),
            }
        }
    }
}

/// Minimal bounding balls of every triangle of a mesh, at its current pose.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleBalls {
    balls: Vec<Ball>,
}

impl TriangleBalls {
    pub fn of(mesh: &TriangleMesh) -> Self {
        Self::of_with(mesh, Exec::default())
    }

    pub fn of_with(mesh: &TriangleMesh, exec: Exec) -> Self {
        TriangleBalls {
            balls: exec.map(mesh.triangle_count(), |t| {
                min_bounding_sphere(&mesh.triangle(t))
            }),
        }
    }

    pub fn get(&self, t: usize) -> Ball {
        self.balls[t]
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }
}

/// Overlapping triangle bounding balls, with no cone filter.
///
/// Every overlap is reported as a contact, so `raw == contacts.len()`.
pub fn baseline_bounding_ball(
    pair: &CandidatePair,
    mesh_a: &TriangleMesh,
    mesh_b: &TriangleMesh,
) -> NarrowOutcome {
    let balls_a = TriangleBalls::of(mesh_a);
    let balls_b = TriangleBalls::of(mesh_b);
    baseline_bounding_ball_with(pair, mesh_a, mesh_b, &balls_a, &balls_b, Exec::default())
}

pub fn baseline_bounding_ball_with(
    pair: &CandidatePair,
    mesh_a: &TriangleMesh,
    mesh_b: &TriangleMesh,
    balls_a: &TriangleBalls,
    balls_b: &TriangleBalls,
    exec: Exec,
) -> NarrowOutcome {
    let rows = enumerate_pairs(
        pair,
        mesh_a,
        mesh_b,
        |t| balls_a.get(t),
        |t| balls_b.get(t),
        exec,
    );
    let per_row = exec.map(rows.len(), |r| {
        let (ta, ref tbs) = rows[r];
        let a = TriRef {
            object: mesh_a.object_id(),
            tri: ta,
        };
        let fallback = mesh_a.normal(ta);
        tbs.iter()
            .filter_map(|&tb| {
                let b = TriRef {
                    object: mesh_b.object_id(),
                    tri: tb,
                };
                ball_contact(a, balls_a.get(ta), b, balls_b.get(tb), fallback)
            })
            .map(|c| super::Contact {
                validated: true,
                ..c
            })
            .collect::<Vec<_>>()
    });
    let contacts: Vec<_> = per_row.into_iter().flatten().collect();
    NarrowOutcome {
        raw: contacts.len(),
        contacts,
    }
}

/// Exact triangle–triangle intersection over every triangle pair of the candidate objects.
///
/// `raw` counts intersecting pairs. Contacts carry the triangles' minimal
/// bounding balls so the solver can push them apart like any other contact.
pub fn baseline_polygon_exact(
    pair: &CandidatePair,
    mesh_a: &TriangleMesh,
    mesh_b: &TriangleMesh,
) -> NarrowOutcome {
    baseline_polygon_exact_with(pair, mesh_a, mesh_b, Exec::default())
}

pub fn baseline_polygon_exact_with(
    pair: &CandidatePair,
    mesh_a: &TriangleMesh,
    mesh_b: &TriangleMesh,
    exec: Exec,
) -> NarrowOutcome {
    let rows: Vec<(usize, Vec<usize>)> = if pair.shortlist.is_some() || pair.is_self() {
        // Shortlists and self pairs never consult the balls.
        let all = |_: usize| Ball {
            center: geom::Vec3::zeros(),
            radius: f64::INFINITY,
        };
        enumerate_pairs(pair, mesh_a, mesh_b, all, all, exec)
    } else {
        let nb = mesh_b.triangle_count();
        (0..mesh_a.triangle_count())
            .map(|a| (a, (0..nb).collect()))
            .collect()
    };
    let per_row = exec.map(rows.len(), |r| {
        let (ta, ref tbs) = rows[r];
        let tri_a = mesh_a.triangle(ta);
        let mut hits = 0;
        let mut found = Vec::new();
        for &tb in tbs {
            let tri_b = mesh_b.triangle(tb);
            if !exact_tri_tri(&tri_a, &tri_b) {
                continue;
            }
            hits += 1;
            let a = TriRef {
                object: mesh_a.object_id(),
                tri: ta,
            };
            let b = TriRef {
                object: mesh_b.object_id(),
                tri: tb,
            };
            let (ba, bb) = (min_bounding_sphere(&tri_a), min_bounding_sphere(&tri_b));
            if let Some(c) = ball_contact(a, ba, b, bb, mesh_a.normal(ta)) {
                found.push(super::Contact {
                    validated: true,
                    ..c
                });
            }
        }
        (hits, found)
    });
    let mut out = NarrowOutcome::default();
    for (hits, found) in per_row {
        out.raw += hits;
        out.contacts.extend(found);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;
    use crate::mesh::{shapes, ObjectId};

    #[test]
    fn min_ball_acute_and_obtuse() {
        let s3 = 3f64.sqrt();
        let eq = [Vec3::zeros(), Vec3::x(), Vec3::new(0.5, s3 / 2.0, 0.0)];
        let b = min_bounding_sphere(&eq);
        assert!((b.radius - 1.0 / s3).abs() < 1e-15);

        let obtuse = [
            Vec3::zeros(),
            Vec3::new(4.0, 0.0, 0.0),
            Vec3::new(2.0, 0.5, 0.0),
        ];
        let b = min_bounding_sphere(&obtuse);
        assert_eq!(b.center, Vec3::new(2.0, 0.0, 0.0));
        assert_eq!(b.radius, 2.0);
        for v in &obtuse {
            assert!((v - b.center).norm() <= b.radius * (1.0 + 1e-12));
        }
    }

    #[test]
    fn distant_meshes_yield_nothing() {
        let m1 = shapes::icosphere(1, 1.0);
        let mut m2 = m1.clone();
        m2.transform(|v| v + Vec3::new(10.0, 0.0, 0.0));
        m2.set_object_id(ObjectId(1));
        let pair = CandidatePair::new(ObjectId(0), ObjectId(1));
        assert_eq!(
            baseline_bounding_ball(&pair, &m1, &m2),
            NarrowOutcome::default()
        );
        assert_eq!(
            baseline_polygon_exact(&pair, &m1, &m2),
            NarrowOutcome::default()
        );
    }

    #[test]
    fn interpenetrating_icospheres() {
        let m1 = shapes::icosphere(2, 1.0);
        let mut m2 = m1.clone();
        m2.transform(|v| v + Vec3::new(1.5, 0.0, 0.0));
        m2.set_object_id(ObjectId(1));
        let pair = CandidatePair::new(ObjectId(0), ObjectId(1));
        let bb = baseline_bounding_ball(&pair, &m1, &m2);
        assert!(!bb.contacts.is_empty());
        assert_eq!(bb.raw, bb.contacts.len());
        let exact = baseline_polygon_exact(&pair, &m1, &m2);
        assert!(exact.raw > 0);
        // Intersecting triangles always have overlapping bounding balls.
        for c in &exact.contacts {
            assert!(bb
                .contacts
                .iter()
                .any(|d| d.tri_a == c.tri_a && d.tri_b == c.tri_b));
        }
    }
}
