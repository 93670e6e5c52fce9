use circumcollide::detect::{narrow_phase_with, CandidatePair, ObjectView};
use circumcollide::mesh::{
    build_adjacency, build_dual_mesh, curvature_field_with, shapes, ObjectId, TriangleMesh,
};
use circumcollide::pbd::{predict_with, ParticleState, SolverConfig};
use circumcollide::sphere::{update_spheres_with, SphereParams, SphereSet};
use circumcollide::{Exec, Vec3};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

const EXECS: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn icosphere_at(sub: u32, x: f64, id: usize) -> TriangleMesh {
    let mut m = shapes::icosphere(sub, 0.5);
    m.transform(|v| v + Vec3::new(x, 0.0, 0.0));
    m.set_object_id(ObjectId(id));
    m
}

fn curvature(c: &mut Criterion) {
    let mesh = shapes::icosphere(5, 1.0);
    let dual = build_dual_mesh(&mesh, &build_adjacency(&mesh).unwrap());
    let mut g = c.benchmark_group("curvature_field");
    for (name, exec) in EXECS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| curvature_field_with(black_box(&dual), exec).unwrap())
        });
    }
    g.finish();
}

fn spheres(c: &mut Criterion) {
    let mesh = shapes::icosphere(5, 1.0);
    let k = curvature_field_with(
        &build_dual_mesh(&mesh, &build_adjacency(&mesh).unwrap()),
        Exec::Parallel,
    )
    .unwrap();
    let params = SphereParams {
        update_threshold_d: 0.0,
        ..SphereParams::for_bbox_diagonal(mesh.bbox_diagonal())
    };
    let mut moved = mesh.clone();
    moved.transform(|v| v * 1.01);
    let mut g = c.benchmark_group("spheres");
    for (name, exec) in EXECS {
        g.bench_function(BenchmarkId::new("build", name), |b| {
            b.iter(|| SphereSet::build_with(black_box(&mesh), &k, &params, 0, exec).unwrap())
        });
        let base = SphereSet::build_with(&mesh, &k, &params, 0, exec).unwrap();
        g.bench_function(BenchmarkId::new("rebuild_all", name), |b| {
            b.iter_batched_ref(
                || base.clone(),
                |set| update_spheres_with(set, &moved, &params, &k, 1, exec),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    g.finish();
}

fn narrow(c: &mut Criterion) {
    let meshes = [icosphere_at(4, -0.45, 0), icosphere_at(4, 0.45, 1)];
    let sets: Vec<(SphereSet, Vec<Vec3>, SphereParams)> = meshes
        .iter()
        .map(|m| {
            let k = curvature_field_with(
                &build_dual_mesh(m, &build_adjacency(m).unwrap()),
                Exec::Parallel,
            )
            .unwrap();
            let p = SphereParams::for_bbox_diagonal(m.bbox_diagonal());
            (SphereSet::build(m, &k, &p, 0).unwrap(), m.normals(), p)
        })
        .collect();
    let view = |i: usize| ObjectView {
        mesh: &meshes[i],
        spheres: &sets[i].0,
        normals: &sets[i].1,
        params: &sets[i].2,
    };
    let pair = CandidatePair::new(ObjectId(0), ObjectId(1));
    let mut g = c.benchmark_group("narrow_phase");
    for (name, exec) in EXECS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| narrow_phase_with(black_box(&pair), view(0), view(1), exec))
        });
    }
    g.finish();
}

fn predict(c: &mut Criterion) {
    let mesh = shapes::grid(400, 4.0, shapes::Facing::Up);
    let mut state =
        ParticleState::new(mesh.vertices().to_vec(), vec![1.0; mesh.vertex_count()]).unwrap();
    let config = SolverConfig::default();
    let mut g = c.benchmark_group("predict");
    for (name, exec) in EXECS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| predict_with(black_box(&mut state), &config, exec))
        });
    }
    g.finish();
}

criterion_group!(benches, curvature, spheres, narrow, predict);
criterion_main!(benches);
