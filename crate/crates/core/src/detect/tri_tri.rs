//! Exact closed triangle–triangle intersection.
//!
//! Orientation-only formulation (Guigue–Devillers): every decision is the
//! sign of a 3×3 or 2×2 determinant, evaluated with adaptive exact
//! arithmetic, so the answer is exact for the given floating-point inputs.

use robust::{orient2d, orient3d, Coord, Coord3D};

use crate::geom::{Tri, Vec3};

#[inline]
fn c3(v: &Vec3) -> Coord3D<f64> {
    Coord3D {
        x: v.x,
        y: v.y,
        z: v.z,
    }
}

/// Sign of `(a − d) · ((b − d) × (c − d))`.
#[inline]
fn o3(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> i8 {
    sign(orient3d(c3(a), c3(b), c3(c), c3(d)))
}

#[inline]
fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// True iff the two closed triangles share at least one point.
pub fn exact_tri_tri(a: &Tri, b: &Tri) -> bool {
    let [p1, q1, r1] = a;
    let [p2, q2, r2] = b;

    // Sides of a's vertices relative to b's plane.
    let dp1 = o3(p1, p2, q2, r2);
    let dq1 = o3(q1, p2, q2, r2);
    let dr1 = o3(r1, p2, q2, r2);
    if dp1 * dq1 > 0 && dp1 * dr1 > 0 {
        return false;
    }
    // Sides of b's vertices relative to a's plane.
    let dp2 = o3(p2, p1, q1, r1);
    let dq2 = o3(q2, p1, q1, r1);
    let dr2 = o3(r2, p1, q1, r1);
    if dp2 * dq2 > 0 && dp2 * dr2 > 0 {
        return false;
    }

    // Rotate a so that its first vertex is alone on its side, flipping b to match.
    let d2 = [dp2, dq2, dr2];
    if dp1 > 0 {
        if dq1 > 0 {
            tri_tri_3d([r1, p1, q1], [p2, r2, q2], flip(d2), a, b)
        } else if dr1 > 0 {
            tri_tri_3d([q1, r1, p1], [p2, r2, q2], flip(d2), a, b)
        } else {
            tri_tri_3d([p1, q1, r1], [p2, q2, r2], d2, a, b)
        }
    } else if dp1 < 0 {
        if dq1 < 0 {
            tri_tri_3d([r1, p1, q1], [p2, q2, r2], d2, a, b)
        } else if dr1 < 0 {
            tri_tri_3d([q1, r1, p1], [p2, q2, r2], d2, a, b)
        } else {
            tri_tri_3d([p1, q1, r1], [p2, r2, q2], flip(d2), a, b)
        }
    } else if dq1 < 0 {
        if dr1 >= 0 {
            tri_tri_3d([q1, r1, p1], [p2, r2, q2], flip(d2), a, b)
        } else {
            tri_tri_3d([p1, q1, r1], [p2, q2, r2], d2, a, b)
        }
    } else if dq1 > 0 {
        if dr1 > 0 {
            tri_tri_3d([p1, q1, r1], [p2, r2, q2], flip(d2), a, b)
        } else {
            tri_tri_3d([q1, r1, p1], [p2, q2, r2], d2, a, b)
        }
    } else if dr1 > 0 {
        tri_tri_3d([r1, p1, q1], [p2, q2, r2], d2, a, b)
    } else if dr1 < 0 {
        tri_tri_3d([r1, p1, q1], [p2, r2, q2], flip(d2), a, b)
    } else {
        coplanar(a, b)
    }
}

/// Reorders `[dp, dq, dr]` to match swapping the last two vertices.
#[inline]
fn flip(d: [i8; 3]) -> [i8; 3] {
    [d[0], d[2], d[1]]
}

fn tri_tri_3d(a: [&Vec3; 3], b: [&Vec3; 3], d: [i8; 3], ta: &Tri, tb: &Tri) -> bool {
    let [p1, q1, r1] = a;
    let [p2, q2, r2] = b;
    let [dp2, dq2, dr2] = d;
    if dp2 > 0 {
        if dq2 > 0 {
            check_min_max([p1, r1, q1], [r2, p2, q2])
        } else if dr2 > 0 {
            check_min_max([p1, r1, q1], [q2, r2, p2])
        } else {
            check_min_max([p1, q1, r1], [p2, q2, r2])
        }
    } else if dp2 < 0 {
        if dq2 < 0 {
            check_min_max([p1, q1, r1], [r2, p2, q2])
        } else if dr2 < 0 {
            check_min_max([p1, q1, r1], [q2, r2, p2])
        } else {
            check_min_max([p1, r1, q1], [p2, q2, r2])
        }
    } else if dq2 < 0 {
        if dr2 >= 0 {
            check_min_max([p1, r1, q1], [q2, r2, p2])
        } else {
            check_min_max([p1, q1, r1], [p2, q2, r2])
        }
    } else if dq2 > 0 {
        if dr2 > 0 {
            check_min_max([p1, r1, q1], [p2, q2, r2])
        } else {
            check_min_max([p1, q1, r1], [q2, r2, p2])
        }
    } else if dr2 > 0 {
        check_min_max([p1, q1, r1], [r2, p2, q2])
    } else if dr2 < 0 {
        check_min_max([p1, r1, q1], [r2, p2, q2])
    } else {
        coplanar(ta, tb)
    }
}

/// Interval overlap of the two triangles along their planes' intersection line.
#[inline]
fn check_min_max(a: [&Vec3; 3], b: [&Vec3; 3]) -> bool {
    let [p1, q1, r1] = a;
    let [p2, q2, _] = b;
    let r2 = b[2];
    if o3(q2, p2, p1, q1) > 0 {
        return false;
    }
    o3(r2, p2, r1, p1) <= 0
}

fn coplanar(a: &Tri, b: &Tri) -> bool {
    // Projection is exact and keeps both triangles non-degenerate.
    let project = projector(a);
    triangles_overlap_2d(&a.map(|v| project(&v)), &b.map(|v| project(&v)))
}

/// Drops the coordinate along which the triangle's normal is largest.
fn projector(t: &Tri) -> impl Fn(&Vec3) -> Coord<f64> {
    let n = (t[1] - t[0]).cross(&(t[2] - t[0]));
    let (nx, ny, nz) = (n.x.abs(), n.y.abs(), n.z.abs());
    move |v: &Vec3| {
        if nx >= ny && nx >= nz {
            Coord { x: v.y, y: v.z }
        } else if ny >= nz {
            Coord { x: v.x, y: v.z }
        } else {
            Coord { x: v.x, y: v.y }
        }
    }
}

/// True iff `p` lies exactly on the closed triangle.
pub fn point_on_triangle(p: &Vec3, t: &Tri) -> bool {
    if o3(p, &t[0], &t[1], &t[2]) != 0 {
        return false;
    }
    let project = projector(t);
    point_in_triangle(&t.map(|v| project(&v)), project(p))
}

fn o2(a: Coord<f64>, b: Coord<f64>, c: Coord<f64>) -> i8 {
    sign(orient2d(a, b, c))
}

fn on_segment(a: Coord<f64>, b: Coord<f64>, p: Coord<f64>) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_meet(p1: Coord<f64>, p2: Coord<f64>, q1: Coord<f64>, q2: Coord<f64>) -> bool {
    let d1 = o2(p1, p2, q1);
    let d2 = o2(p1, p2, q2);
    let d3 = o2(q1, q2, p1);
    let d4 = o2(q1, q2, p2);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment(p1, p2, q1))
        || (d2 == 0 && on_segment(p1, p2, q2))
        || (d3 == 0 && on_segment(q1, q2, p1))
        || (d4 == 0 && on_segment(q1, q2, p2))
}

fn point_in_triangle(t: &[Coord<f64>; 3], p: Coord<f64>) -> bool {
    let s = [o2(t[0], t[1], p), o2(t[1], t[2], p), o2(t[2], t[0], p)];
    !(s.iter().any(|&x| x > 0) && s.iter().any(|&x| x < 0))
}

fn triangles_overlap_2d(a: &[Coord<f64>; 3], b: &[Coord<f64>; 3]) -> bool {
    for i in 0..3 {
        for j in 0..3 {
            if segments_meet(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3]) {
                return true;
            }
        }
    }
    point_in_triangle(b, a[0]) || point_in_triangle(a, b[0])
}
