//! Two-phase collision detection.
//!
//! Objects are first culled pairwise by vertex bounding spheres. Surviving
//! pairs go to the narrow phase, which tests triangle circumspheres for
//! overlap and keeps only contacts whose center line falls inside the
//! triangles' normal safety cones. Two baselines (per-triangle bounding balls,
//! exact triangle intersection) share the same contact type for comparison.

mod baseline;
mod pipeline;
mod tri_tri;

pub use baseline::{
    baseline_bounding_ball, baseline_bounding_ball_with, baseline_polygon_exact,
    baseline_polygon_exact_with, min_bounding_sphere, TriangleBalls,
};
pub use pipeline::{Detection, Detector, Method};
pub use tri_tri::{exact_tri_tri, point_on_triangle};

use crate::exec::Exec;
use crate::geom::{self, Vec3};
use crate::mesh::{ObjectId, TriangleMesh};
use crate::sphere::{Circumsphere, ConeMode, SphereParams, SphereSet};

/// Centers closer than this are treated as coincident.
pub const COINCIDENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingSphere {
    pub center: Vec3,
    pub radius: f64,
    pub object_id: ObjectId,
}

/// Pair of objects whose bounding spheres touch. `object_a == object_b`
/// denotes self-collision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePair {
    pub object_a: ObjectId,
    pub object_b: ObjectId,
    /// Restricts the narrow phase to these `(tri_a, tri_b)` pairs.
    pub shortlist: Option<Vec<(usize, usize)>>,
}

impl CandidatePair {
    pub fn new(object_a: ObjectId, object_b: ObjectId) -> Self {
        CandidatePair {
            object_a,
            object_b,
            shortlist: None,
        }
    }

    pub fn is_self(&self) -> bool {
        self.object_a == self.object_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriRef {
    pub object: ObjectId,
    pub tri: usize,
}

/// A ball used to resolve a contact: where it was and how big.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Vec3,
    pub radius: f64,
}

/// Collision event between two triangles, expressed through their spheres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub tri_a: TriRef,
    pub tri_b: TriRef,
    /// Unit vector from sphere a's center toward sphere b's.
    pub normal: Vec3,
    /// `r_a + r_b − |c_b − c_a|`.
    pub depth: f64,
    /// Midpoint of the center segment.
    pub point: Vec3,
    pub validated: bool,
    pub ball_a: Ball,
    pub ball_b: Ball,
}

impl Contact {
    /// The same contact seen from the other side.
    pub fn flipped(&self) -> Contact {
        Contact {
            tri_a: self.tri_b,
            tri_b: self.tri_a,
            normal: -self.normal,
            ball_a: self.ball_b,
            ball_b: self.ball_a,
            ..*self
        }
    }
}

/// Strict overlap of two balls. Coincident centers fall back to `fallback_normal`.
pub(crate) fn ball_contact(
    a: TriRef,
    ball_a: Ball,
    b: TriRef,
    ball_b: Ball,
    fallback_normal: Vec3,
) -> Option<Contact> {
    let d = ball_b.center - ball_a.center;
    let reach = ball_a.radius + ball_b.radius;
    let dist2 = d.norm_squared();
    if dist2 >= reach * reach {
        return None;
    }
    let dist = dist2.sqrt();
    let normal = if dist < COINCIDENT_EPS {
        fallback_normal
    } else {
        d / dist
    };
    Some(Contact {
        tri_a: a,
        tri_b: b,
        normal,
        depth: reach - dist,
        point: (ball_a.center + ball_b.center) * 0.5,
        validated: false,
        ball_a,
        ball_b,
    })
}

/// Centroid center plus farthest-vertex radius. Not minimal, but encloses every vertex.
pub fn object_bounding_sphere(mesh: &TriangleMesh) -> BoundingSphere {
    let verts = mesh.vertices();
    let center = if verts.is_empty() {
        Vec3::zeros()
    } else {
        verts.iter().sum::<Vec3>() / verts.len() as f64
    };
    let radius = verts
        .iter()
        .map(|v| (v - center).norm())
        .fold(0.0, f64::max);
    BoundingSphere {
        center,
        radius,
        object_id: mesh.object_id(),
    }
}

/// All pairs of distinct objects whose bounding spheres touch (`≤`), `a < b`.
pub fn broad_phase(spheres: &[BoundingSphere]) -> Vec<CandidatePair> {
    let mut out = Vec::new();
    for (i, a) in spheres.iter().enumerate() {
        for b in &spheres[i + 1..] {
            if a.object_id == b.object_id {
                continue;
            }
            if (a.center - b.center).norm() <= a.radius + b.radius {
                let (lo, hi) = if a.object_id < b.object_id {
                    (a.object_id, b.object_id)
                } else {
                    (b.object_id, a.object_id)
                };
                out.push(CandidatePair::new(lo, hi));
            }
        }
    }
    out.sort_by_key(|p| (p.object_a, p.object_b));
    out
}

/// Raw (unvalidated) contact between two circumspheres, if they strictly overlap.
pub fn sphere_overlap(a: &Circumsphere, b: &Circumsphere) -> Option<Contact> {
    ball_contact(
        TriRef {
            object: a.object,
            tri: a.triangle,
        },
        Ball {
            center: a.center,
            radius: a.radius,
        },
        TriRef {
            object: b.object,
            tri: b.triangle,
        },
        Ball {
            center: b.center,
            radius: b.radius,
        },
        a.normal,
    )
}

/// Accepts a contact whose center line lies inside the safety cone(s).
///
/// `normals` are the current unit normals of triangles a and b.
pub fn cone_validate(
    contact: &Contact,
    sphere_a: &Circumsphere,
    sphere_b: &Circumsphere,
    normals: (&Vec3, &Vec3),
    tol: f64,
    mode: ConeMode,
) -> Option<Contact> {
    let inside_a = geom::angle_between(normals.0, &contact.normal) <= sphere_a.safety_angle + tol;
    let accepted = match mode {
        ConeMode::OneSided => inside_a,
        ConeMode::TwoSided => {
            inside_a
                && geom::angle_between(normals.1, &(-contact.normal)) <= sphere_b.safety_angle + tol
        }
    };
    accepted.then_some(Contact {
        validated: true,
        ..*contact
    })
}

/// What the narrow phase sees of one object.
#[derive(Debug, Clone, Copy)]
pub struct ObjectView<'a> {
    pub mesh: &'a TriangleMesh,
    pub spheres: &'a SphereSet,
    /// Current unit normals, one per triangle.
    pub normals: &'a [Vec3],
    pub params: &'a SphereParams,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NarrowOutcome {
    /// Overlapping sphere pairs before cone validation.
    pub raw: usize,
    /// Validated contacts, ordered by `(tri_a, tri_b)`.
    pub contacts: Vec<Contact>,
}

/// Triangle indices of `of` whose ball can reach a ball set enclosed by `(center, radius)`.
pub(crate) fn cull<F>(count: usize, ball: F, center: Vec3, radius: f64) -> Vec<usize>
where
    F: Fn(usize) -> Ball,
{
    (0..count)
        .filter(|&t| {
            let b = ball(t);
            let reach = b.radius + radius;
            (b.center - center).norm_squared() < reach * reach
        })
        .collect()
}

/// Triangle pairs the narrow phase must examine for `pair`.
///
/// Cross-object pairs are culled against the enclosing sphere of the other
/// side's balls; self pairs skip triangles that share a vertex.
pub(crate) fn enumerate_pairs<FA, FB>(
    pair: &CandidatePair,
    mesh_a: &TriangleMesh,
    mesh_b: &TriangleMesh,
    ball_a: FA,
    ball_b: FB,
    exec: Exec,
) -> Vec<(usize, Vec<usize>)>
where
    FA: Fn(usize) -> Ball,
    FB: Fn(usize) -> Ball,
{
    if let Some(list) = &pair.shortlist {
        let mut rows: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut sorted = list.clone();
        sorted.sort_unstable();
        sorted.dedup();
        for (a, b) in sorted {
            if pair.is_self() && (a == b || mesh_a.share_vertex(a, b)) {
                continue;
            }
            match rows.last_mut() {
                Some((ta, bs)) if *ta == a => bs.push(b),
                _ => rows.push((a, vec![b])),
            }
        }
        return rows;
    }
    if pair.is_self() {
        let n = mesh_a.triangle_count();
        return exec
            .map(n, |a| {
                let bs: Vec<usize> = (a + 1..n).filter(|&b| !mesh_a.share_vertex(a, b)).collect();
                (a, bs)
            })
            .into_iter()
            .filter(|(_, bs)| !bs.is_empty())
            .collect();
    }
    let (ca, ra) = enclosing(mesh_a.triangle_count(), &ball_a);
    let (cb, rb) = enclosing(mesh_b.triangle_count(), &ball_b);
    let side_a = cull(mesh_a.triangle_count(), &ball_a, cb, rb);
    let side_b = cull(mesh_b.triangle_count(), &ball_b, ca, ra);
    if side_b.is_empty() {
        return Vec::new();
    }
    side_a.into_iter().map(|a| (a, side_b.clone())).collect()
}

fn enclosing<F: Fn(usize) -> Ball>(count: usize, ball: &F) -> (Vec3, f64) {
    if count == 0 {
        return (Vec3::zeros(), 0.0);
    }
    let center = (0..count).map(|t| ball(t).center).sum::<Vec3>() / count as f64;
    let radius = (0..count)
        .map(|t| {
            let b = ball(t);
            (b.center - center).norm() + b.radius
        })
        .fold(0.0, f64::max);
    (center, radius)
}

fn sphere_ball(set: &SphereSet, t: usize) -> Ball {
    let s = set.get(t);
    Ball {
        center: s.center,
        radius: s.radius,
    }
}

/// Validated circumsphere contacts between the triangles of a candidate pair.
///
/// For self pairs pass the same view twice.
pub fn narrow_phase(pair: &CandidatePair, a: ObjectView<'_>, b: ObjectView<'_>) -> NarrowOutcome {
    narrow_phase_with(pair, a, b, Exec::default())
}

pub fn narrow_phase_with(
    pair: &CandidatePair,
    a: ObjectView<'_>,
    b: ObjectView<'_>,
    exec: Exec,
) -> NarrowOutcome {
    let rows = enumerate_pairs(
        pair,
        a.mesh,
        b.mesh,
        |t| sphere_ball(a.spheres, t),
        |t| sphere_ball(b.spheres, t),
        exec,
    );
    let params = a.params;
    let per_row = exec.map(rows.len(), |r| {
        let (ta, ref tbs) = rows[r];
        let sa = a.spheres.get(ta);
        let mut raw = 0;
        let mut found = Vec::new();
        for &tb in tbs {
            let sb = b.spheres.get(tb);
            if let Some(c) = sphere_overlap(sa, sb) {
                raw += 1;
                let normals = (&a.normals[ta], &b.normals[tb]);
                if let Some(v) =
                    cone_validate(&c, sa, sb, normals, params.cone_tolerance, params.cone_mode)
                {
                    found.push(v);
                }
            }
        }
        (raw, found)
    });
    let mut out = NarrowOutcome::default();
    for (raw, found) in per_row {
        out.raw += raw;
        out.contacts.extend(found);
    }
    out
}
