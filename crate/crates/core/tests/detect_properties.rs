use circumcollide::detect::{
    broad_phase, exact_tri_tri, narrow_phase_with, object_bounding_sphere, sphere_overlap,
    CandidatePair, Detector, Method, ObjectView,
};
use circumcollide::geom::Tri;
use circumcollide::mesh::{
    build_adjacency, build_dual_mesh, curvature_field, shapes, ObjectId, TriangleMesh,
};
use circumcollide::sphere::{build_circumsphere, SphereParams, SphereSet};
use circumcollide::{Exec, Vec3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Floating-point segment/triangle crossing, or `None` when the answer is
/// within `margin` of flipping.
fn segment_hits(p: &Vec3, q: &Vec3, t: &Tri, margin: f64) -> Option<bool> {
    let dir = q - p;
    let e1 = t[1] - t[0];
    let e2 = t[2] - t[0];
    let h = dir.cross(&e2);
    let det = e1.dot(&h);
    let scale = dir.norm() * e1.norm() * e2.norm();
    if det.abs() <= margin * scale {
        return None;
    }
    let s = p - t[0];
    let u = s.dot(&h) / det;
    let qv = s.cross(&e1);
    let v = dir.dot(&qv) / det;
    let along = e2.dot(&qv) / det;
    let coords = [u, v, 1.0 - u - v, along, 1.0 - along];
    if coords.iter().any(|c| c.abs() <= margin) {
        return None;
    }
    Some(coords.iter().all(|&c| c > 0.0))
}

/// Two non-coplanar triangles meet iff an edge of one crosses the other.
fn oracle(a: &Tri, b: &Tri) -> Option<bool> {
    let mut hit = false;
    for (x, y) in [(a, b), (b, a)] {
        for i in 0..3 {
            hit |= segment_hits(&x[i], &x[(i + 1) % 3], y, 1e-7)?;
        }
    }
    Some(hit)
}

fn random_tri(rng: &mut impl Rng, center: Vec3, size: f64) -> Tri {
    loop {
        let t: Tri = std::array::from_fn(|_| {
            center
                + Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ) * size
        });
        if circumcollide::geom::area(&t) > 1e-2 * size * size {
            return t;
        }
    }
}

#[test]
fn exact_predicate_agrees_with_edge_crossing_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut checked, mut hits) = (0, 0);
    while checked < 10_000 {
        let a = random_tri(&mut rng, Vec3::zeros(), 1.0);
        let shift = Vec3::new(rng.random_range(-1.0..1.0), 0.0, 0.0);
        let b = random_tri(&mut rng, shift, 1.0);
        let Some(want) = oracle(&a, &b) else { continue };
        assert_eq!(exact_tri_tri(&a, &b), want, "{a:?} {b:?}");
        assert_eq!(exact_tri_tri(&b, &a), want);
        checked += 1;
        hits += usize::from(want);
    }
    assert!(hits > 1000 && hits < 9000, "{hits} intersecting pairs");
}

/// Intersecting pairs built by sliding b so it passes through a point of a.
fn intersecting_pairs(n: usize, seed: u64) -> Vec<(Tri, Tri)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = random_tri(&mut rng, Vec3::zeros(), 1.0);
        let size = rng.random_range(0.2..2.0);
        let b = random_tri(&mut rng, Vec3::zeros(), size);
        let wa: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.05..1.0));
        let wb: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.05..1.0));
        let at = |t: &Tri, w: &[f64; 3]| {
            (t[0] * w[0] + t[1] * w[1] + t[2] * w[2]) / (w[0] + w[1] + w[2])
        };
        let shift = at(&a, &wa) - at(&b, &wb);
        let b = b.map(|v| v + shift);
        if exact_tri_tri(&a, &b) {
            out.push((a, b));
        }
    }
    out
}

#[test]
fn every_intersecting_pair_overlaps_before_the_cone() {
    let params = SphereParams::default();
    for (a, b) in intersecting_pairs(1000, 11) {
        let ma = TriangleMesh::new(a.to_vec(), vec![[0, 1, 2]], ObjectId(0)).unwrap();
        let mb = TriangleMesh::new(b.to_vec(), vec![[0, 1, 2]], ObjectId(1)).unwrap();
        for k in [0.0, 1.0, 100.0] {
            let sa = build_circumsphere(&ma, 0, k, &params, 0).unwrap();
            let sb = build_circumsphere(&mb, 0, k, &params, 0).unwrap();
            let c = sphere_overlap(&sa, &sb).expect("intersecting pair missed");
            assert!(c.depth >= 0.0);
            assert!((c.normal.norm() - 1.0).abs() < 1e-9);
        }
    }
}

struct Object {
    mesh: TriangleMesh,
    spheres: SphereSet,
    normals: Vec<Vec3>,
    params: SphereParams,
}

impl Object {
    fn new(mut mesh: TriangleMesh, id: usize) -> Self {
        mesh.set_object_id(ObjectId(id));
        let params = SphereParams::for_bbox_diagonal(mesh.bbox_diagonal());
        let k = curvature_field(&build_dual_mesh(&mesh, &build_adjacency(&mesh).unwrap())).unwrap();
        Object {
            spheres: SphereSet::build(&mesh, &k, &params, 0).unwrap(),
            normals: mesh.normals(),
            mesh,
            params,
        }
    }

    fn view(&self) -> ObjectView<'_> {
        ObjectView {
            mesh: &self.mesh,
            spheres: &self.spheres,
            normals: &self.normals,
            params: &self.params,
        }
    }
}

fn ball_at(offset: Vec3, sub: u32, radius: f64, id: usize) -> Object {
    let mut m = shapes::icosphere(sub, radius);
    m.transform(|v| v + offset);
    Object::new(m, id)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn narrow_phase_is_symmetric(x in 0.5..1.3f64, y in -0.5..0.5f64, z in -0.5..0.5f64) {
        let a = ball_at(Vec3::zeros(), 1, 0.7, 0);
        let b = ball_at(Vec3::new(x, y, z), 2, 0.6, 1);
        let ab = narrow_phase_with(&CandidatePair::new(ObjectId(0), ObjectId(1)), a.view(), b.view(), Exec::Sequential);
        let ba = narrow_phase_with(&CandidatePair::new(ObjectId(1), ObjectId(0)), b.view(), a.view(), Exec::Sequential);
        prop_assert_eq!(ab.raw, ba.raw);
        let mut flipped: Vec<_> = ba.contacts.iter().map(|c| c.flipped()).collect();
        flipped.sort_by_key(|c| (c.tri_a.tri, c.tri_b.tri));
        prop_assert_eq!(ab.contacts.len(), flipped.len());
        for (p, q) in ab.contacts.iter().zip(&flipped) {
            prop_assert_eq!((p.tri_a, p.tri_b), (q.tri_a, q.tri_b));
            prop_assert!((p.normal - q.normal).norm() < 1e-12);
            prop_assert!((p.depth - q.depth).abs() < 1e-12);
        }
    }

    #[test]
    fn broad_phase_keeps_touching_objects(
        offsets in prop::collection::vec(prop::array::uniform3(-1.5..1.5f64), 2..5),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let meshes: Vec<TriangleMesh> = offsets
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let tris: Vec<Tri> = (0..4).map(|_| random_tri(&mut rng, Vec3::from(*o), 0.6)).collect();
                let verts: Vec<Vec3> = tris.iter().flatten().copied().collect();
                let idx = (0..4).map(|t| [3 * t, 3 * t + 1, 3 * t + 2]).collect();
                TriangleMesh::new(verts, idx, ObjectId(i)).unwrap()
            })
            .collect();
        let bounds: Vec<_> = meshes.iter().map(object_bounding_sphere).collect();
        for (m, b) in meshes.iter().zip(&bounds) {
            for v in m.vertices() {
                prop_assert!((v - b.center).norm() <= b.radius * (1.0 + 1e-9));
            }
        }
        let pairs = broad_phase(&bounds);
        for i in 0..meshes.len() {
            for j in i + 1..meshes.len() {
                let touching = (0..4).any(|s| (0..4).any(|t| exact_tri_tri(&meshes[i].triangle(s), &meshes[j].triangle(t))));
                if touching {
                    prop_assert!(pairs.iter().any(|p| p.object_a == ObjectId(i) && p.object_b == ObjectId(j)));
                }
            }
        }
    }
}

fn impact_meshes(gap: f64) -> Vec<TriangleMesh> {
    let mut a = shapes::icosphere(2, 1.0);
    let mut b = shapes::icosphere(2, 1.0);
    a.transform(|v| v - Vec3::new(gap / 2.0, 0.0, 0.0));
    b.transform(|v| v + Vec3::new(gap / 2.0, 0.0, 0.0));
    b.set_object_id(ObjectId(1));
    vec![a, b]
}

#[test]
fn unit_spheres_closer_than_touching_collide() {
    let meshes = impact_meshes(1.9);
    let params = vec![SphereParams::for_bbox_diagonal(meshes[0].bbox_diagonal()); 2];
    let mut det = Detector::new(
        &meshes,
        &params,
        &[false, false],
        Method::Circumsphere,
        Exec::default(),
    )
    .unwrap();
    let found = det.detect(&meshes, 1);
    assert!(!found.contacts.is_empty());
    assert!(found.contacts.iter().all(|c| c.validated && c.depth >= 0.0));
}

#[test]
fn detection_is_deterministic_across_strategies() {
    let meshes = impact_meshes(1.8);
    let params = vec![SphereParams::for_bbox_diagonal(meshes[0].bbox_diagonal()); 2];
    let mut runs = Vec::new();
    for method in Method::ALL {
        for exec in [Exec::Sequential, Exec::Parallel, Exec::Parallel] {
            let mut det = Detector::new(&meshes, &params, &[true, false], method, exec).unwrap();
            runs.push((method, det.detect(&meshes, 1)));
        }
    }
    for w in runs.chunks(3) {
        assert!(!w[0].1.contacts.is_empty(), "{:?}", w[0].0);
        assert_eq!(w[0].1, w[1].1);
        assert_eq!(w[1].1, w[2].1);
        let keys: Vec<_> = w[0].1.contacts.iter().map(|c| (c.tri_a, c.tri_b)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
