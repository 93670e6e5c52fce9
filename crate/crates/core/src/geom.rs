//! Small vector helpers shared across modules.

pub type Vec3 = nalgebra::Vector3<f64>;

/// Vertices of a single triangle.
pub type Tri = [Vec3; 3];

#[inline]
pub fn centroid(t: &Tri) -> Vec3 {
    (t[0] + t[1] + t[2]) / 3.0
}

/// Un-normalized normal `(b - a) × (c - a)`; its length is twice the area.
#[inline]
pub fn area_vector(t: &Tri) -> Vec3 {
    (t[1] - t[0]).cross(&(t[2] - t[0]))
}

#[inline]
pub fn area(t: &Tri) -> f64 {
    0.5 * area_vector(t).norm()
}

/// Outward unit normal for counter-clockwise winding. Zero for a degenerate triangle.
#[inline]
pub fn unit_normal(t: &Tri) -> Vec3 {
    let n = area_vector(t);
    let len = n.norm();
    if len > 0.0 {
        n / len
    } else {
        Vec3::zeros()
    }
}

/// Unsigned angle between two vectors in `[0, π]`, stable near 0 and π.
#[inline]
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

pub fn bbox(points: &[Vec3]) -> Option<(Vec3, Vec3)> {
    let first = *points.first()?;
    Some(
        points
            .iter()
            .fold((first, first), |(lo, hi), p| (lo.inf(p), hi.sup(p))),
    )
}

pub fn bbox_diagonal(points: &[Vec3]) -> f64 {
    bbox(points).map_or(0.0, |(lo, hi)| (hi - lo).norm())
}
