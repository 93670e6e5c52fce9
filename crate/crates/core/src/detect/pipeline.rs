use serde::Deserialize;

use super::{
    baseline_bounding_ball_with, baseline_polygon_exact_with, broad_phase, narrow_phase_with,
    object_bounding_sphere, CandidatePair, Contact, NarrowOutcome, ObjectView, TriangleBalls,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::mesh::{
    build_adjacency, build_dual_mesh, curvature_field_with, CurvatureField, ObjectId, TriangleMesh,
};
use crate::sphere::{update_spheres_with, SphereParams, SphereSet};

/// Narrow-phase strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Circumsphere,
    BoundingBall,
    PolygonExact,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::Circumsphere,
        Method::BoundingBall,
        Method::PolygonExact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Circumsphere => "circumsphere",
            Method::BoundingBall => "bounding-ball",
            Method::PolygonExact => "polygon-exact",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::config(format!("unknown method `{s}`")))
    }
}

/// Result of one detection pass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Detection {
    /// Accepted contacts, ordered by object pair, then by `(tri_a, tri_b)`.
    pub contacts: Vec<Contact>,
    /// Overlaps before cone validation (circumsphere), or all reported pairs (baselines).
    pub raw_contacts: usize,
    pub validated_contacts: usize,
    /// Spheres rebuilt this pass.
    pub rebuild_count: usize,
}

#[derive(Debug, Clone)]
struct Tracked {
    params: SphereParams,
    curvature: CurvatureField,
    spheres: SphereSet,
    self_collision: bool,
}

/// Stateful detector for a fixed set of objects.
///
/// Curvature is evaluated once, on the meshes given to [`Detector::new`].
#[derive(Debug, Clone)]
pub struct Detector {
    method: Method,
    exec: Exec,
    objects: Vec<Tracked>,
}

impl Detector {
    /// `meshes[i]` must carry `ObjectId(i)`. `params` and `self_collision` are per object.
    pub fn new(
        meshes: &[TriangleMesh],
        params: &[SphereParams],
        self_collision: &[bool],
        method: Method,
        exec: Exec,
    ) -> Result<Self> {
        if params.len() != meshes.len() || self_collision.len() != meshes.len() {
            return Err(Error::config(
                "one sphere parameter set and self-collision flag per object",
            ));
        }
        let mut objects = Vec::with_capacity(meshes.len());
        for (i, mesh) in meshes.iter().enumerate() {
            if mesh.object_id() != ObjectId(i) {
                return Err(Error::config(format!(
                    "mesh {i} carries {:?}",
                    mesh.object_id()
                )));
            }
            params[i].validate()?;
            let curvature = if method == Method::Circumsphere {
                let dual = build_dual_mesh(mesh, &build_adjacency(mesh)?);
                curvature_field_with(&dual, exec)?
            } else {
                CurvatureField::zeros(mesh.triangle_count())
            };
            let spheres = SphereSet::build_with(mesh, &curvature, &params[i], 0, exec)?;
            objects.push(Tracked {
                params: params[i],
                curvature,
                spheres,
                self_collision: self_collision[i],
            });
        }
        Ok(Detector {
            method,
            exec,
            objects,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn spheres(&self, object: usize) -> &SphereSet {
        &self.objects[object].spheres
    }

    pub fn curvature(&self, object: usize) -> &CurvatureField {
        &self.objects[object].curvature
    }

    /// Object pairs for the narrow phase: broad-phase survivors plus self pairs.
    pub fn candidates(&self, meshes: &[TriangleMesh]) -> Vec<CandidatePair> {
        let bounds: Vec<_> = meshes.iter().map(object_bounding_sphere).collect();
        let mut pairs = broad_phase(&bounds);
        for (i, o) in self.objects.iter().enumerate() {
            if o.self_collision {
                pairs.push(CandidatePair::new(ObjectId(i), ObjectId(i)));
            }
        }
        pairs.sort_by_key(|p| (p.object_a, p.object_b));
        pairs
    }

    /// Detects contacts at the meshes' current positions.
    pub fn detect(&mut self, meshes: &[TriangleMesh], frame: u64) -> Detection {
        assert_eq!(meshes.len(), self.objects.len(), "object count changed");
        let exec = self.exec;
        let mut out = Detection::default();
        let pairs = self.candidates(meshes);
        match self.method {
            Method::Circumsphere => {
                for (o, mesh) in self.objects.iter_mut().zip(meshes) {
                    out.rebuild_count += update_spheres_with(
                        &mut o.spheres,
                        mesh,
                        &o.params,
                        &o.curvature,
                        frame,
                        exec,
                    );
                }
                let normals: Vec<_> = meshes.iter().map(TriangleMesh::normals).collect();
                let view = |i: usize| ObjectView {
                    mesh: &meshes[i],
                    spheres: &self.objects[i].spheres,
                    normals: &normals[i],
                    params: &self.objects[i].params,
                };
                for pair in &pairs {
                    let (a, b) = (pair.object_a.0, pair.object_b.0);
                    merge(&mut out, narrow_phase_with(pair, view(a), view(b), exec));
                }
            }
            Method::BoundingBall => {
                let balls: Vec<_> = meshes
                    .iter()
                    .map(|m| TriangleBalls::of_with(m, exec))
                    .collect();
                out.rebuild_count = balls.iter().map(TriangleBalls::len).sum();
                for pair in &pairs {
                    let (a, b) = (pair.object_a.0, pair.object_b.0);
                    let found = baseline_bounding_ball_with(
                        pair, &meshes[a], &meshes[b], &balls[a], &balls[b], exec,
                    );
                    merge(&mut out, found);
                }
            }
            Method::PolygonExact => {
                for pair in &pairs {
                    let (a, b) = (pair.object_a.0, pair.object_b.0);
                    merge(
                        &mut out,
                        baseline_polygon_exact_with(pair, &meshes[a], &meshes[b], exec),
                    );
                }
            }
        }
        out.validated_contacts = out.contacts.len();
        out
    }
}

fn merge(out: &mut Detection, found: NarrowOutcome) {
    out.raw_contacts += found.raw;
    out.contacts.extend(found.contacts);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;
    use crate::mesh::shapes;

    fn two_spheres(gap: f64) -> Vec<TriangleMesh> {
        let a = shapes::icosphere(2, 1.0);
        let mut b = a.clone();
        b.transform(|v| v + Vec3::new(gap, 0.0, 0.0));
        b.set_object_id(ObjectId(1));
        vec![a, b]
    }

    fn detector(meshes: &[TriangleMesh], method: Method) -> Detector {
        let p = SphereParams::for_bbox_diagonal(meshes[0].bbox_diagonal());
        Detector::new(meshes, &[p, p], &[false, false], method, Exec::default()).unwrap()
    }

    #[test]
    fn near_spheres_touch_near_closest_points() {
        let meshes = two_spheres(1.9);
        let found = detector(&meshes, Method::Circumsphere).detect(&meshes, 0);
        assert!(found.validated_contacts > 0);
        assert!(found.raw_contacts >= found.validated_contacts);
        for c in &found.contacts {
            // The gap is centered at x = 0.95.
            assert!((c.point.x - 0.95).abs() < 0.2, "{:?}", c.point);
        }
    }

    #[test]
    fn all_methods_quiet_when_apart() {
        let meshes = two_spheres(5.0);
        for m in Method::ALL {
            let found = detector(&meshes, m).detect(&meshes, 0);
            assert_eq!(found.raw_contacts, 0, "{m:?}");
            assert!(found.contacts.is_empty());
        }
    }

    #[test]
    fn flat_cloth_has_no_self_contacts() {
        let cloth = shapes::grid(10, 1.0, shapes::Facing::Up);
        let p = SphereParams::for_bbox_diagonal(cloth.bbox_diagonal());
        let meshes = vec![cloth];
        let mut d = Detector::new(
            &meshes,
            &[p],
            &[true],
            Method::Circumsphere,
            Exec::default(),
        )
        .unwrap();
        assert!(d.detect(&meshes, 0).contacts.is_empty());
    }

    #[test]
    fn rejects_mismatched_ids() {
        let mut meshes = two_spheres(5.0);
        meshes.swap(0, 1);
        let p = SphereParams::default();
        assert!(Detector::new(
            &meshes,
            &[p, p],
            &[false, false],
            Method::Circumsphere,
            Exec::default()
        )
        .is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("nope".parse::<Method>().is_err());
    }
}
