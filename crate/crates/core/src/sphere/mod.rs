//! Curvature-adaptive circumscribed spheres over mesh triangles.
//!
//! Each triangle gets a sphere through its three vertices whose center sits
//! on the normal line through the circumcenter, pushed inward by
//! `φ = √(r² − R_c²)`. The radius `r` blends a flat-regime radius with the
//! curvature radius through a cubic Hermite factor. Spheres are rebuilt
//! lazily, only once a triangle has moved more than `update_threshold_d`
//! sphere radii since its last build; in between, the sphere follows the
//! triangle centroid at a fixed offset.

use std::f64::consts::FRAC_PI_2;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geom::{self, Tri, Vec3};
use crate::mesh::{CurvatureField, ObjectId, TriangleMesh};

/// How many safety cones a contact must fall inside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeMode {
    /// Only the first sphere's cone is checked.
    OneSided,
    #[default]
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereParams {
    /// Curvature (1/m²) at and beyond which the Hermite factor is 0.
    pub k_threshold: f64,
    /// Radius multiplier on the circumradius for flat regions (≥ 1).
    pub flat_scale: f64,
    /// Clamp bounds on `1/|K|`, as fractions of the circumradius.
    pub curv_radius_min_frac: f64,
    pub curv_radius_max_frac: f64,
    /// Rebuild a sphere once `shape_change` exceeds this fraction.
    pub update_threshold_d: f64,
    /// Slack added to safety angles during cone validation (radians).
    pub cone_tolerance: f64,
    pub cone_mode: ConeMode,
}

impl Default for SphereParams {
    fn default() -> Self {
        SphereParams::for_bbox_diagonal(1.0)
    }
}

impl SphereParams {
    /// Defaults with the curvature cutoff at a radius of one fifth of `diag`.
    pub fn for_bbox_diagonal(diag: f64) -> Self {
        SphereParams {
            k_threshold: 25.0 / (diag * diag),
            flat_scale: 1.2,
            curv_radius_min_frac: 1.0,
            curv_radius_max_frac: 1.5,
            update_threshold_d: 0.7,
            cone_tolerance: 5f64.to_radians(),
            cone_mode: ConeMode::TwoSided,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.k_threshold > 0.0
            && self.k_threshold.is_finite()
            && self.flat_scale >= 1.0
            && 0.0 < self.curv_radius_min_frac
            && self.curv_radius_min_frac <= 1.0
            && 1.0 <= self.curv_radius_max_frac
            && self.update_threshold_d >= 0.0
            && self.cone_tolerance >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!(
                "invalid sphere parameters: {self:?}"
            )))
        }
    }
}

/// Sphere through a triangle's vertices, with its build-time snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circumsphere {
    /// Current center. Equals the build center until the triangle moves.
    pub center: Vec3,
    pub radius: f64,
    pub object: ObjectId,
    pub triangle: usize,
    /// `atan2(R_c, φ)`: half-angle of the normal safety cone.
    pub safety_angle: f64,
    pub circumradius: f64,
    /// Inward offset of the center from the triangle plane.
    pub phi: f64,
    /// Outward unit normal at build time.
    pub normal: Vec3,
    /// Center minus triangle centroid, fixed between rebuilds.
    pub offset: Vec3,
    pub ref_vertices: Tri,
    pub ref_radius: f64,
    pub build_frame: u64,
}

impl Circumsphere {
    /// Moves the sphere with its triangle: `center = centroid + offset`.
    #[inline]
    pub fn follow(&mut self, tri: &Tri) {
        self.center = geom::centroid(tri) + self.offset;
    }
}

/// Circumcenter and circumradius of a triangle.
pub fn circumcenter(a: &Vec3, b: &Vec3, c: &Vec3) -> Result<(Vec3, f64)> {
    let ab = b - a;
    let ac = c - a;
    let n = ab.cross(&ac);
    let n2 = n.norm_squared();
    if !(n2 > f64::EPSILON * ab.norm_squared() * ac.norm_squared()) {
        return Err(Error::Collinear);
    }
    let offset = (n.cross(&ab) * ac.norm_squared() + ac.cross(&n) * ab.norm_squared()) / (2.0 * n2);
    Ok((a + offset, offset.norm()))
}

/// Cubic Hermite falloff `1 − 3t² + 2t³` with `t = clamp(|K| / k_threshold, 0, 1)`.
#[inline]
pub fn hermite_factor(k: f64, k_threshold: f64) -> f64 {
    let t = (k.abs() / k_threshold).clamp(0.0, 1.0);
    1.0 - t * t * (3.0 - 2.0 * t)
}

/// Blends `flat_scale·R_c` with the clamped curvature radius `1/|K|`.
pub fn sphere_radius(circumradius: f64, k: f64, params: &SphereParams) -> f64 {
    let f = hermite_factor(k, params.k_threshold);
    let r_flat = params.flat_scale * circumradius;
    let r_curv = if k == 0.0 {
        r_flat
    } else {
        (1.0 / k.abs()).clamp(
            params.curv_radius_min_frac * circumradius,
            params.curv_radius_max_frac * circumradius,
        )
    };
    f * r_flat + (1.0 - f) * r_curv
}

/// Builds the sphere of one triangle from its current vertex positions.
pub fn build_circumsphere(
    mesh: &TriangleMesh,
    tri: usize,
    k: f64,
    params: &SphereParams,
    frame: u64,
) -> Result<Circumsphere> {
    build_from_vertices(mesh.triangle(tri), mesh.object_id(), tri, k, params, frame)
}

pub(crate) fn build_from_vertices(
    verts: Tri,
    object: ObjectId,
    tri: usize,
    k: f64,
    params: &SphereParams,
    frame: u64,
) -> Result<Circumsphere> {
    let (cc, rc) = circumcenter(&verts[0], &verts[1], &verts[2])?;
    let normal = geom::unit_normal(&verts);
    // r < R_c is only reachable with min_frac < 1; such spheres collapse onto the circumcircle.
    let radius = sphere_radius(rc, k, params).max(rc);
    let phi = (radius * radius - rc * rc).max(0.0).sqrt();
    let center = cc - phi * normal;
    Ok(Circumsphere {
        center,
        radius,
        object,
        triangle: tri,
        safety_angle: if phi == 0.0 { FRAC_PI_2 } else { rc.atan2(phi) },
        circumradius: rc,
        phi,
        normal,
        offset: center - geom::centroid(&verts),
        ref_vertices: verts,
        ref_radius: radius,
        build_frame: frame,
    })
}

/// Largest vertex displacement since the last build, in units of the build radius.
pub fn shape_change(sphere: &Circumsphere, mesh: &TriangleMesh) -> f64 {
    shape_change_of(sphere, &mesh.triangle(sphere.triangle))
}

#[inline]
fn shape_change_of(sphere: &Circumsphere, verts: &Tri) -> f64 {
    let moved = verts
        .iter()
        .zip(&sphere.ref_vertices)
        .map(|(now, then)| (now - then).norm())
        .fold(0.0, f64::max);
    moved / sphere.ref_radius
}

/// One circumsphere per triangle of a mesh.
#[derive(Debug, Clone)]
pub struct SphereSet {
    spheres: Vec<Circumsphere>,
    pub rebuild_count_this_frame: usize,
}

impl SphereSet {
    /// Initial build of every sphere.
    pub fn build(
        mesh: &TriangleMesh,
        curvature: &CurvatureField,
        params: &SphereParams,
        frame: u64,
    ) -> Result<Self> {
        Self::build_with(mesh, curvature, params, frame, Exec::default())
    }

    pub fn build_with(
        mesh: &TriangleMesh,
        curvature: &CurvatureField,
        params: &SphereParams,
        frame: u64,
        exec: Exec,
    ) -> Result<Self> {
        params.validate()?;
        let spheres = exec
            .map(mesh.triangle_count(), |t| {
                build_circumsphere(mesh, t, curvature.triangle(t), params, frame)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(SphereSet {
            rebuild_count_this_frame: spheres.len(),
            spheres,
        })
    }

    pub fn spheres(&self) -> &[Circumsphere] {
        &self.spheres
    }

    pub fn get(&self, t: usize) -> &Circumsphere {
        &self.spheres[t]
    }

    pub fn len(&self) -> usize {
        self.spheres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spheres.is_empty()
    }

    /// Sphere enclosing every circumsphere of the set: `(center, radius)`.
    pub fn enclosing(&self) -> (Vec3, f64) {
        if self.spheres.is_empty() {
            return (Vec3::zeros(), 0.0);
        }
        let center =
            self.spheres.iter().map(|s| s.center).sum::<Vec3>() / self.spheres.len() as f64;
        let radius = self
            .spheres
            .iter()
            .map(|s| (s.center - center).norm() + s.radius)
            .fold(0.0, f64::max);
        (center, radius)
    }
}

/// Rebuilds every sphere whose triangle moved more than `update_threshold_d`
/// and moves the rest along with their triangles. Returns the rebuild count.
///
/// Curvature is not recomputed; rebuilt spheres reuse the field they are given.
/// A triangle that has collapsed keeps its previous sphere.
pub fn update_spheres(
    set: &mut SphereSet,
    mesh: &TriangleMesh,
    params: &SphereParams,
    curvature: &CurvatureField,
    frame: u64,
) -> usize {
    update_spheres_with(set, mesh, params, curvature, frame, Exec::default())
}

pub fn update_spheres_with(
    set: &mut SphereSet,
    mesh: &TriangleMesh,
    params: &SphereParams,
    curvature: &CurvatureField,
    frame: u64,
    exec: Exec,
) -> usize {
    let d = params.update_threshold_d;
    let rebuilt = exec.sum_mut(&mut set.spheres, |t, sphere| {
        let verts = mesh.triangle(t);
        if shape_change_of(sphere, &verts) > d {
            if let Ok(fresh) = build_from_vertices(
                verts,
                sphere.object,
                t,
                curvature.triangle(t),
                params,
                frame,
            ) {
                *sphere = fresh;
                return 1;
            }
        }
        sphere.follow(&verts);
        0
    });
    set.rebuild_count_this_frame = rebuilt;
    rebuilt
}
