//! Scene files and the worlds built from them.
//!
//! A scene is a TOML document: global solver and detection settings at the
//! top level, then one `[[object]]` table per body and optional
//! `[[obstacle]]` tables for the tunneling check.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::detect::Method;
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{build_adjacency, load_mesh, shapes, ObjectId, TriangleMesh};
use crate::pbd::{edge_constraints, DistanceConstraint, ParticleState, SolverConfig};
use crate::sphere::{ConeMode, SphereParams};

/// Built-in scenes, by name.
pub const CANONICAL_SCENES: [(&str, &str); 3] = [
    (
        "cloth-over-sphere",
        include_str!("../../scenes/cloth-over-sphere.toml"),
    ),
    (
        "two-sphere-impact",
        include_str!("../../scenes/two-sphere-impact.toml"),
    ),
    (
        "sphere-drop-on-plane",
        include_str!("../../scenes/sphere-drop-on-plane.toml"),
    ),
];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_frames")]
    pub frames: u64,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_gravity")]
    pub gravity: [f64; 3],
    #[serde(default = "default_damping")]
    pub damping: f64,
    #[serde(default = "default_one")]
    pub stiffness: f64,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub seed: u64,
    /// Where `run` writes its metrics when no `--out` is given.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub sphere: SphereOverrides,
    #[serde(default, rename = "object")]
    pub objects: Vec<ObjectSpec>,
    #[serde(default, rename = "obstacle")]
    pub obstacles: Vec<ObstacleSpec>,
    /// Directory that relative mesh paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_dt() -> f64 {
    1.0 / 60.0
}
fn default_frames() -> u64 {
    100
}
fn default_iterations() -> usize {
    10
}
fn default_gravity() -> [f64; 3] {
    [0.0, -9.81, 0.0]
}
fn default_damping() -> f64 {
    0.99
}
fn default_one() -> f64 {
    1.0
}

/// Sphere parameters shared by all objects. Unset fields take the defaults;
/// the curvature threshold defaults per object to `25 / diag²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereOverrides {
    pub k_threshold: Option<f64>,
    pub flat_scale: Option<f64>,
    pub curv_radius_min_frac: Option<f64>,
    pub curv_radius_max_frac: Option<f64>,
    pub update_threshold_d: Option<f64>,
    pub cone_tolerance_deg: Option<f64>,
    pub cone_mode: Option<ConeMode>,
}

impl SphereOverrides {
    pub fn params_for(&self, diag: f64) -> SphereParams {
        let base = SphereParams::for_bbox_diagonal(diag);
        SphereParams {
            k_threshold: self.k_threshold.unwrap_or(base.k_threshold),
            flat_scale: self.flat_scale.unwrap_or(base.flat_scale),
            curv_radius_min_frac: self
                .curv_radius_min_frac
                .unwrap_or(base.curv_radius_min_frac),
            curv_radius_max_frac: self
                .curv_radius_max_frac
                .unwrap_or(base.curv_radius_max_frac),
            update_threshold_d: self.update_threshold_d.unwrap_or(base.update_threshold_d),
            cone_tolerance: self
                .cone_tolerance_deg
                .map_or(base.cone_tolerance, f64::to_radians),
            cone_mode: self.cone_mode.unwrap_or(base.cone_mode),
        }
    }
}

/// Pinned vertices: explicit indices, or `"none"`, `"corners"` (grids), `"all"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Pinned {
    Indices(Vec<usize>),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    /// `cloth`, `icosphere` or `plane`. Exclusive with `mesh`.
    pub generator: Option<String>,
    /// Path to a mesh file.
    pub mesh: Option<PathBuf>,
    /// Grid resolution (vertices per side) for `cloth` and `plane`.
    pub n: Option<usize>,
    /// Side length of `cloth` and `plane`.
    pub size: Option<f64>,
    #[serde(default)]
    pub facing: shapes::Facing,
    pub subdivisions: Option<u32>,
    pub radius: Option<f64>,
    /// Total mass in kg, spread evenly over the vertices.
    #[serde(default = "default_one")]
    pub mass: f64,
    pub pinned: Option<Pinned>,
    #[serde(default)]
    pub translate: [f64; 3],
    #[serde(default)]
    pub velocity: [f64; 3],
    /// Amplitude of seeded random vertex noise (m).
    #[serde(default)]
    pub jitter: f64,
    #[serde(default)]
    pub self_collision: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObstacleSpec {
    Sphere {
        center: [f64; 3],
        radius: f64,
    },
    HalfSpace {
        point: [f64; 3],
        normal: [f64; 3],
    },
    /// A closed scene object, by index.
    Mesh {
        object: usize,
    },
}

/// Volume used by the tunneling check.
#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle {
    Sphere {
        center: Vec3,
        radius: f64,
    },
    /// Inside is `(x − point) · normal < 0`.
    HalfSpace {
        point: Vec3,
        normal: Vec3,
    },
    Mesh {
        object: usize,
    },
}

impl SceneConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: SceneConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::File {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::from_toml(&text)?;
        config.base_dir = path.parent().map(Path::to_path_buf);
        Ok(config)
    }

    /// A built-in scene by name.
    pub fn canonical(name: &str) -> Result<Self> {
        CANONICAL_SCENES
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::config(format!("no built-in scene `{name}`")))
            .and_then(|(_, text)| Self::from_toml(text))
    }

    /// A file path, or failing that, a built-in scene name.
    pub fn resolve(arg: &str) -> Result<Self> {
        let path = Path::new(arg);
        if path.exists() || CANONICAL_SCENES.iter().all(|(n, _)| *n != arg) {
            Self::load(path)
        } else {
            Self::canonical(arg)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || self.frames < 1 {
            return Err(Error::config("dt must be positive and frames at least 1"));
        }
        if self.objects.is_empty() {
            return Err(Error::config("a scene needs at least one object"));
        }
        if matches!(self.sphere.update_threshold_d, Some(d) if !(d >= 0.0)) {
            return Err(Error::config("update_threshold_d must be non-negative"));
        }
        for o in &self.obstacles {
            if let ObstacleSpec::Mesh { object } = o {
                if *object >= self.objects.len() {
                    return Err(Error::config(format!(
                        "obstacle refers to missing object {object}"
                    )));
                }
            }
        }
        self.solver().validate()
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            dt: self.dt,
            iterations: self.iterations,
            gravity: Vec3::from(self.gravity),
            stiffness: self.stiffness,
            damping: self.damping,
        }
    }
}

/// Everything a simulation needs, generated from a scene.
#[derive(Debug, Clone)]
pub struct World {
    /// Object meshes; `meshes[i]` carries `ObjectId(i)`.
    pub meshes: Vec<TriangleMesh>,
    /// Particle index of each object's first vertex.
    pub offsets: Vec<usize>,
    pub state: ParticleState,
    pub distance: Vec<DistanceConstraint>,
    pub sphere_params: Vec<SphereParams>,
    pub self_collision: Vec<bool>,
    pub obstacles: Vec<Obstacle>,
}

impl World {
    /// Global particle index of vertex `v` of `object`.
    pub fn particle(&self, object: usize, v: usize) -> usize {
        self.offsets[object] + v
    }

    /// Global particle indices of a triangle.
    pub fn triangle_particles(&self, object: usize, t: usize) -> [usize; 3] {
        self.meshes[object].triangles()[t].map(|v| self.offsets[object] + v)
    }

    /// Copies predicted (or committed) particle positions into the meshes.
    pub fn sync_meshes(&mut self, predicted: bool) {
        let positions = if predicted {
            &self.state.predicted
        } else {
            &self.state.positions
        };
        for (mesh, &base) in self.meshes.iter_mut().zip(&self.offsets) {
            let n = mesh.vertex_count();
            mesh.vertices_mut()
                .copy_from_slice(&positions[base..base + n]);
        }
    }
}

fn base_mesh(spec: &ObjectSpec, base_dir: Option<&Path>) -> Result<TriangleMesh> {
    match (&spec.generator, &spec.mesh) {
        (Some(_), Some(_)) => Err(Error::config(
            "an object takes either `generator` or `mesh`",
        )),
        (None, None) => Err(Error::config("an object needs `generator` or `mesh`")),
        (None, Some(path)) => {
            let path = match base_dir {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path.clone(),
            };
            load_mesh(&path)
        }
        (Some(name), None) => match name.as_str() {
            "cloth" | "plane" => {
                let n = spec.n.unwrap_or(if name == "cloth" { 20 } else { 2 });
                if n < 2 {
                    return Err(Error::config("grids need at least 2 vertices per side"));
                }
                Ok(shapes::grid(
                    n,
                    positive(spec.size.unwrap_or(1.0), "size")?,
                    spec.facing,
                ))
            }
            "icosphere" => Ok(shapes::icosphere(
                spec.subdivisions.unwrap_or(2),
                positive(spec.radius.unwrap_or(1.0), "radius")?,
            )),
            other => Err(Error::UnknownGenerator(other.to_string())),
        },
    }
}

fn positive(x: f64, what: &str) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::config(format!("{what} must be positive")))
    }
}

fn pinned_vertices(spec: &ObjectSpec, mesh: &TriangleMesh) -> Result<Vec<usize>> {
    let nv = mesh.vertex_count();
    let default = match spec.generator.as_deref() {
        Some("cloth") => "corners",
        Some("plane") => "all",
        _ => "none",
    };
    let list = match &spec.pinned {
        Some(Pinned::Indices(list)) => list.clone(),
        Some(Pinned::Named(name)) => named_pins(name, spec, nv)?,
        None => named_pins(default, spec, nv)?,
    };
    if let Some(&bad) = list.iter().find(|&&v| v >= nv) {
        return Err(Error::config(format!("pinned vertex {bad} out of range")));
    }
    Ok(list)
}

fn named_pins(name: &str, spec: &ObjectSpec, nv: usize) -> Result<Vec<usize>> {
    match name {
        "none" => Ok(Vec::new()),
        "all" => Ok((0..nv).collect()),
        "corners" if matches!(spec.generator.as_deref(), Some("cloth" | "plane")) => {
            Ok(shapes::grid_corners(spec.n.unwrap_or(20)).to_vec())
        }
        other => Err(Error::config(format!("unknown pin set `{other}`"))),
    }
}

/// Builds the particles of a scene along with their meshes and constraints.
///
/// Deterministic for a given config, seed included.
pub fn generate_scene(config: &SceneConfig) -> Result<World> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut meshes = Vec::new();
    let mut offsets = Vec::new();
    let (mut positions, mut velocities, mut inv_mass) = (Vec::new(), Vec::new(), Vec::new());
    let mut distance = Vec::new();
    let mut sphere_params = Vec::new();
    for (i, spec) in config.objects.iter().enumerate() {
        let mut mesh = base_mesh(spec, config.base_dir.as_deref())?;
        mesh.set_object_id(ObjectId(i));
        let shift = Vec3::from(spec.translate);
        if spec.jitter > 0.0 {
            let a = spec.jitter;
            let noise: Vec<Vec3> = (0..mesh.vertex_count())
                .map(|_| {
                    Vec3::new(
                        rng.random_range(-a..=a),
                        rng.random_range(-a..=a),
                        rng.random_range(-a..=a),
                    )
                })
                .collect();
            for (v, d) in mesh.vertices_mut().iter_mut().zip(noise) {
                *v += d;
            }
        }
        mesh.transform(|v| v + shift);
        // Re-validate: jitter may fold triangles.
        let mesh = TriangleMesh::new(
            mesh.vertices().to_vec(),
            mesh.triangles().to_vec(),
            ObjectId(i),
        )?;

        let pins = pinned_vertices(spec, &mesh)?;
        let nv = mesh.vertex_count();
        let w = if spec.mass > 0.0 {
            nv as f64 / spec.mass
        } else {
            return Err(Error::config("object mass must be positive"));
        };
        let mut wi = vec![w; nv];
        for p in pins {
            wi[p] = 0.0;
        }
        let base = positions.len();
        offsets.push(base);
        distance.extend(edge_constraints(&mesh, base, config.stiffness)?);
        positions.extend_from_slice(mesh.vertices());
        velocities.extend(wi.iter().map(|&w| {
            if w > 0.0 {
                Vec3::from(spec.velocity)
            } else {
                Vec3::zeros()
            }
        }));
        inv_mass.extend(wi);
        let params = config.sphere.params_for(mesh.bbox_diagonal());
        params.validate()?;
        sphere_params.push(params);
        meshes.push(mesh);
    }
    let obstacles = config
        .obstacles
        .iter()
        .map(|o| match *o {
            ObstacleSpec::Sphere { center, radius } => Ok(Obstacle::Sphere {
                center: Vec3::from(center),
                radius: positive(radius, "obstacle radius")?,
            }),
            ObstacleSpec::HalfSpace { point, normal } => {
                let n = Vec3::from(normal);
                if !(n.norm() > 0.0) {
                    return Err(Error::config("half-space normal must be non-zero"));
                }
                Ok(Obstacle::HalfSpace {
                    point: Vec3::from(point),
                    normal: n.normalize(),
                })
            }
            ObstacleSpec::Mesh { object } => {
                if !build_adjacency(&meshes[object])?.is_closed() {
                    return Err(Error::OpenObstacle(object));
                }
                Ok(Obstacle::Mesh { object })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut state = ParticleState::new(positions, inv_mass)?;
    state.velocities = velocities;
    Ok(World {
        self_collision: config.objects.iter().map(|o| o.self_collision).collect(),
        meshes,
        offsets,
        state,
        distance,
        sphere_params,
        obstacles,
    })
}
