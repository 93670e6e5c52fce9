//! Discrete Gaussian curvature on the dual grid by angle deficit.
//!
//! At an interior dual vertex `x` with neighbors `n0, n1, n2`, the angles
//! `αᵢ` between consecutive dual edges are the corners of the three dual
//! faces meeting at `x`. Curvature is the deficit over the area share of `x`:
//!
//! ```text
//! K(x) = (2π − Σ αᵢ) / A(x),   A(x) = Σ_f area(f) / |f|
//! ```
//!
//! For triangular faces `A(x)` is the barycentric third of the incident area;
//! dual faces are pentagons and hexagons, so each face donates `1/|f|` of its
//! area to each of its corners. The shares partition the surface, which keeps
//! the estimator consistent with Gauss–Bonnet.

use std::f64::consts::TAU;

use super::DualMesh;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geom::Vec3;

/// Gaussian curvature per dual vertex, i.e. per primal triangle (1/m²).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurvatureField {
    values: Vec<f64>,
}

impl CurvatureField {
    pub fn from_values(values: Vec<f64>) -> Self {
        CurvatureField { values }
    }

    /// Flat field: zero everywhere.
    pub fn zeros(n: usize) -> Self {
        CurvatureField {
            values: vec![0.0; n],
        }
    }

    pub fn dual(&self, dv: usize) -> f64 {
        self.values[dv]
    }

    pub fn triangle(&self, t: usize) -> f64 {
        self.values[t]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `K = (2π − angle_sum) / area_share`.
#[inline]
pub fn angle_deficit(angle_sum: f64, area_share: f64) -> f64 {
    (TAU - angle_sum) / area_share
}

/// Counter-clockwise angle from `u` to `w` about `axis`, in `[0, 2π)`.
fn ccw_angle(u: &Vec3, w: &Vec3, axis: &Vec3) -> f64 {
    let cross = u.cross(w);
    let unsigned = cross.norm().atan2(u.dot(w));
    if axis.dot(&cross) < 0.0 {
        TAU - unsigned
    } else {
        unsigned
    }
}

fn face_share(dual: &DualMesh, f: usize) -> f64 {
    let n = dual.dual_faces[f].cycle.len();
    if n == 0 {
        0.0
    } else {
        dual.face_area(f) / n as f64
    }
}

fn deficit_at(dual: &DualMesh, dv: usize, share: impl Fn(usize) -> f64) -> Result<f64> {
    if !dual.is_interior(dv) {
        return Ok(0.0);
    }
    let x = dual.dual_vertices[dv];
    let fan = dual.dual_fans[dv].map(|n| dual.dual_vertices[n.expect("interior fan")] - x);
    let axis = dual.normals[dv];
    let angle_sum: f64 = (0..3)
        .map(|i| ccw_angle(&fan[i], &fan[(i + 1) % 3], &axis))
        .sum();
    let area: f64 = dual.incident_faces[dv].iter().map(|&f| share(f)).sum();
    if !(area > 0.0) || !area.is_finite() {
        return Err(Error::DegenerateFan(dv));
    }
    Ok(angle_deficit(angle_sum, area))
}

/// Gaussian curvature at one dual vertex; 0 on the boundary by convention.
pub fn angle_deficit_curvature(dual: &DualMesh, dv: usize) -> Result<f64> {
    deficit_at(dual, dv, |f| face_share(dual, f))
}

pub fn curvature_field(dual: &DualMesh) -> Result<CurvatureField> {
    curvature_field_with(dual, Exec::default())
}

pub fn curvature_field_with(dual: &DualMesh, exec: Exec) -> Result<CurvatureField> {
    let shares = exec.map(dual.dual_faces.len(), |f| face_share(dual, f));
    let values = exec
        .map(dual.vertex_count(), |dv| {
            deficit_at(dual, dv, |f| shares[f])
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(CurvatureField { values })
}

/// Curvature of a primal triangle, read from its dual vertex.
pub fn triangle_curvature(field: &CurvatureField, tri: usize) -> f64 {
    field.triangle(tri)
}
