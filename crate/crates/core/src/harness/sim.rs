use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::metrics::{stability_metric, write_deterministic_csv, write_metrics_csv, FrameMetrics};
use super::scene::{generate_scene, SceneConfig, World};
use super::tunneling::count_tunneled;
use crate::detect::{Contact, Detector, Method};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::pbd::{predict_with, solve_step_with, CollisionConstraint, SolverConfig};

/// A scene in motion, advanced one frame at a time.
#[derive(Debug, Clone)]
pub struct Simulation {
    world: World,
    detector: Detector,
    solver: SolverConfig,
    exec: Exec,
    frame: u64,
    frames: u64,
    metrics: Vec<FrameMetrics>,
    contacts: Vec<Contact>,
}

impl Simulation {
    pub fn new(config: &SceneConfig) -> Result<Self> {
        Self::with_exec(config, Exec::default())
    }

    pub fn with_exec(config: &SceneConfig, exec: Exec) -> Result<Self> {
        let world = generate_scene(config)?;
        let detector = Detector::new(
            &world.meshes,
            &world.sphere_params,
            &world.self_collision,
            config.method,
            exec,
        )?;
        Ok(Simulation {
            world,
            detector,
            solver: config.solver(),
            exec,
            frame: 0,
            frames: config.frames,
            metrics: Vec::new(),
            contacts: Vec::new(),
        })
    }

    /// Particles, plus meshes holding the positions detection last saw.
    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn detector(&self) -> &Detector {
        &self.detector
    }

    /// Frames completed so far.
    pub fn frame(&self) -> u64 {
        self.frame
    }

    pub fn metrics(&self) -> &[FrameMetrics] {
        &self.metrics
    }

    /// Contacts resolved in the last frame.
    pub fn contacts(&self) -> &[Contact] {
        &self.contacts
    }

    /// predict → detect → solve → measure.
    pub fn step(&mut self) -> Result<FrameMetrics> {
        let frame = self.frame + 1;
        let exec = self.exec;
        let previous = self.world.state.positions.clone();
        predict_with(&mut self.world.state, &self.solver, exec);
        self.world.sync_meshes(true);

        let start = Instant::now();
        let detection = self.detector.detect(&self.world.meshes, frame);
        let detect_time = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let world = &self.world;
        let collisions: Vec<CollisionConstraint> = detection
            .contacts
            .iter()
            .map(|c| {
                let pa = world.triangle_particles(c.tri_a.object.0, c.tri_a.tri);
                let pb = world.triangle_particles(c.tri_b.object.0, c.tri_b.tri);
                CollisionConstraint::new(*c, pa, pb, &world.state.predicted)
            })
            .collect();
        solve_step_with(
            &mut self.world.state,
            &self.world.distance,
            &collisions,
            &self.solver,
            frame,
            exec,
        )?;
        let solve_time = start.elapsed().as_secs_f64();

        let mut touched: Vec<usize> = collisions
            .iter()
            .flat_map(|c| c.particles_a.into_iter().chain(c.particles_b))
            .filter(|&i| self.world.state.inv_mass[i] > 0.0)
            .collect();
        touched.sort_unstable();
        touched.dedup();

        let row = FrameMetrics {
            frame,
            detect_time,
            solve_time,
            rebuild_count: detection.rebuild_count,
            raw_contacts: detection.raw_contacts,
            validated_contacts: detection.validated_contacts,
            stability: stability_metric(&previous, &self.world.state.positions, &touched),
            tunneled_vertices: count_tunneled(&self.world),
        };
        self.frame = frame;
        self.metrics.push(row);
        self.contacts = detection.contacts;
        Ok(row)
    }

    /// Runs the remaining frames of the scene. On failure the rows so far stay in [`Simulation::metrics`].
    pub fn run(&mut self) -> Result<&[FrameMetrics]> {
        while self.frame < self.frames {
            self.step()?;
        }
        Ok(&self.metrics)
    }
}

/// Companion path for the timing-free CSV: `out.csv` → `out.det.csv`.
pub fn deterministic_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.det.csv"))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::File {
            path: path.to_path_buf(),
            source,
        })
}

/// Writes the metrics CSV and its timing-free companion.
pub fn write_run(out: &Path, rows: &[FrameMetrics]) -> Result<()> {
    write_metrics_csv(create(out)?, rows)?;
    write_deterministic_csv(create(&deterministic_path(out))?, rows)
}

/// Runs a scene to completion and writes its metrics to `out`, if given.
///
/// If the solver blows up, the rows up to the failing frame are still written
/// before the error is returned.
pub fn run_scene(config: &SceneConfig, out: Option<&Path>) -> Result<Vec<FrameMetrics>> {
    run_scene_with(config, out, Exec::default())
}

pub fn run_scene_with(
    config: &SceneConfig,
    out: Option<&Path>,
    exec: Exec,
) -> Result<Vec<FrameMetrics>> {
    let mut sim = Simulation::with_exec(config, exec)?;
    let result = sim.run().map(|_| ());
    if let Some(path) = out {
        write_run(path, sim.metrics())?;
    }
    result.map(|_| sim.metrics)
}

/// The scene with another detection method.
pub fn with_method(config: &SceneConfig, method: Method) -> SceneConfig {
    SceneConfig {
        method,
        ..config.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const STATIC: &str =
        "frames = 1\ngravity = [0.0, 0.0, 0.0]\n[[object]]\ngenerator = \"cloth\"\nn = 5\n";

    #[test]
    fn static_scene_single_row() {
        let c = SceneConfig::from_toml(STATIC).unwrap();
        let rows = run_scene(&c, None).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].frame, 1);
        assert_eq!(rows[0].validated_contacts, 0);
        assert_eq!(rows[0].rebuild_count, 0);
    }

    #[test]
    fn writes_both_csvs() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("m.csv");
        let c = SceneConfig::from_toml(STATIC).unwrap();
        run_scene(&c, Some(&out)).unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(deterministic_path(&out).ends_with("m.det.csv"));
        assert!(deterministic_path(&out).exists());
    }

    #[test]
    fn instability_keeps_partial_rows() {
        let c = SceneConfig::from_toml(STATIC).unwrap();
        let mut sim = Simulation::new(&c).unwrap();
        sim.world.state.velocities[7].x = f64::NAN;
        assert!(matches!(sim.step(), Err(Error::Instability { frame: 1 })));
        assert!(sim.metrics().is_empty());
    }
}
