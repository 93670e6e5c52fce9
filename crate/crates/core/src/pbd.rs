//! Position-based dynamics: predict, project constraints, update velocities.

use crate::detect::Contact;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geom::Vec3;
use crate::mesh::TriangleMesh;

const MIN_SEPARATION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    pub positions: Vec<Vec3>,
    pub predicted: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    /// Inverse masses (1/kg); 0 pins a particle.
    pub inv_mass: Vec<f64>,
}

impl ParticleState {
    /// Particles at rest at `positions`.
    pub fn new(positions: Vec<Vec3>, inv_mass: Vec<f64>) -> Result<Self> {
        let n = positions.len();
        let state = ParticleState {
            predicted: positions.clone(),
            velocities: vec![Vec3::zeros(); n],
            positions,
            inv_mass,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.positions.len();
        if self.predicted.len() != n || self.velocities.len() != n || self.inv_mass.len() != n {
            return Err(Error::config("particle arrays differ in length"));
        }
        if self.inv_mass.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::config(
                "inverse masses must be finite and non-negative",
            ));
        }
        let finite = |v: &Vec3| v.iter().all(|c| c.is_finite());
        if !(self.positions.iter().all(finite) && self.velocities.iter().all(finite)) {
            return Err(Error::config("particle state is not finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Total linear momentum of the free particles.
    pub fn momentum(&self) -> Vec3 {
        self.velocities
            .iter()
            .zip(&self.inv_mass)
            .filter(|(_, w)| **w > 0.0)
            .map(|(v, w)| v / *w)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceConstraint {
    pub i: usize,
    pub j: usize,
    pub rest_length: f64,
    /// Fraction of the correction applied per projection, in `[0, 1]`.
    pub stiffness: f64,
}

impl DistanceConstraint {
    pub fn new(i: usize, j: usize, rest_length: f64, stiffness: f64) -> Result<Self> {
        if i == j || !(rest_length > 0.0) || !(0.0..=1.0).contains(&stiffness) {
            return Err(Error::config(format!(
                "invalid distance constraint ({i}, {j}, rest {rest_length}, stiffness {stiffness})"
            )));
        }
        Ok(DistanceConstraint {
            i,
            j,
            rest_length,
            stiffness,
        })
    }

    /// `|p_i − p_j| − rest_length`.
    pub fn violation(&self, p: &[Vec3]) -> f64 {
        (p[self.i] - p[self.j]).norm() - self.rest_length
    }
}

/// One constraint per unique mesh edge at its current length. Particle
/// indices are offset by `base`.
pub fn edge_constraints(
    mesh: &TriangleMesh,
    base: usize,
    stiffness: f64,
) -> Result<Vec<DistanceConstraint>> {
    let v = mesh.vertices();
    mesh.edges()
        .into_iter()
        .map(|[a, b]| DistanceConstraint::new(base + a, base + b, (v[a] - v[b]).norm(), stiffness))
        .collect()
}

/// Non-penetration of two triangle spheres whose centers ride on the triangle centroids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionConstraint {
    pub contact: Contact,
    pub particles_a: [usize; 3],
    pub particles_b: [usize; 3],
    /// Sphere center minus triangle centroid, held fixed while projecting.
    pub offset_a: Vec3,
    pub offset_b: Vec3,
}

impl CollisionConstraint {
    /// Anchors the contact's balls to the triangles' centroids in `predicted`.
    pub fn new(
        contact: Contact,
        particles_a: [usize; 3],
        particles_b: [usize; 3],
        predicted: &[Vec3],
    ) -> Self {
        CollisionConstraint {
            offset_a: contact.ball_a.center - centroid_of(predicted, &particles_a),
            offset_b: contact.ball_b.center - centroid_of(predicted, &particles_b),
            contact,
            particles_a,
            particles_b,
        }
    }

    fn centers(&self, p: &[Vec3]) -> (Vec3, Vec3) {
        (
            centroid_of(p, &self.particles_a) + self.offset_a,
            centroid_of(p, &self.particles_b) + self.offset_b,
        )
    }

    /// `|c_b − c_a| − (r_a + r_b)`; negative while the spheres overlap.
    pub fn value(&self, p: &[Vec3]) -> f64 {
        let (ca, cb) = self.centers(p);
        (cb - ca).norm() - (self.contact.ball_a.radius + self.contact.ball_b.radius)
    }
}

#[inline]
fn centroid_of(p: &[Vec3], idx: &[usize; 3]) -> Vec3 {
    (p[idx[0]] + p[idx[1]] + p[idx[2]]) / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub iterations: usize,
    pub gravity: Vec3,
    /// Stiffness given to structural constraints built by the harness.
    pub stiffness: f64,
    /// Velocity multiplier after each step, in `[0, 1]`.
    pub damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 1.0 / 60.0,
            iterations: 10,
            gravity: Vec3::new(0.0, -9.81, 0.0),
            stiffness: 1.0,
            damping: 0.99,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt > 0.0
            && self.dt.is_finite()
            && self.iterations >= 1
            && self.gravity.iter().all(|g| g.is_finite())
            && (0.0..=1.0).contains(&self.stiffness)
            && (0.0..=1.0).contains(&self.damping);
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!(
                "invalid solver configuration: {self:?}"
            )))
        }
    }
}

/// `predicted = x + v·dt + dt²·g` for free particles; pinned ones stay put.
pub fn predict(state: &mut ParticleState, config: &SolverConfig) {
    predict_with(state, config, Exec::default())
}

pub fn predict_with(state: &mut ParticleState, config: &SolverConfig, exec: Exec) {
    let (x, v, w) = (&state.positions, &state.velocities, &state.inv_mass);
    let dt = config.dt;
    let g = config.gravity * (dt * dt);
    exec.for_each_mut(&mut state.predicted, |i, p| {
        *p = if w[i] > 0.0 {
            x[i] + v[i] * dt + g
        } else {
            x[i]
        };
    });
}

/// Projects one distance constraint in place on `p`.
pub fn project_distance(c: &DistanceConstraint, p: &mut [Vec3], inv_mass: &[f64]) {
    let (wi, wj) = (inv_mass[c.i], inv_mass[c.j]);
    let wsum = wi + wj;
    if wsum == 0.0 {
        return;
    }
    let delta = p[c.i] - p[c.j];
    let len = delta.norm();
    if len < MIN_SEPARATION {
        return;
    }
    let d = delta / len;
    let err = len - c.rest_length;
    if wi > 0.0 {
        p[c.i] -= d * (c.stiffness * wi / wsum * err);
    }
    if wj > 0.0 {
        p[c.j] += d * (c.stiffness * wj / wsum * err);
    }
}

/// Pushes the two triangles apart along the center line until their spheres
/// only touch, splitting the correction by inverse-mass sums.
pub fn project_collision(c: &CollisionConstraint, p: &mut [Vec3], inv_mass: &[f64]) {
    let wa: f64 = c.particles_a.iter().map(|&i| inv_mass[i]).sum();
    let wb: f64 = c.particles_b.iter().map(|&i| inv_mass[i]).sum();
    if wa + wb == 0.0 {
        return;
    }
    let (ca, cb) = c.centers(p);
    let between = cb - ca;
    let dist = between.norm();
    let gap = dist - (c.contact.ball_a.radius + c.contact.ball_b.radius);
    if gap >= 0.0 {
        return;
    }
    let n = if dist < MIN_SEPARATION {
        c.contact.normal
    } else {
        between / dist
    };
    // Centroid shifts; particle i carries 3·w_i/W of its side's shift.
    let shift_a = n * (gap * wa / (wa + wb));
    let shift_b = -n * (gap * wb / (wa + wb));
    for (side, w_side, shift) in [(&c.particles_a, wa, shift_a), (&c.particles_b, wb, shift_b)] {
        if w_side == 0.0 {
            continue;
        }
        for &i in side {
            if inv_mass[i] > 0.0 {
                p[i] += shift * (3.0 * inv_mass[i] / w_side);
            }
        }
    }
}

/// Largest violation over all constraints at positions `p`.
pub fn max_violation(
    p: &[Vec3],
    distance: &[DistanceConstraint],
    collisions: &[CollisionConstraint],
) -> f64 {
    let d = distance
        .iter()
        .map(|c| c.violation(p).abs())
        .fold(0.0, f64::max);
    collisions
        .iter()
        .map(|c| (-c.value(p)).max(0.0))
        .fold(d, f64::max)
}

/// Largest constraint violation before the first sweep and after each one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveTrace {
    pub initial: f64,
    pub per_iteration: Vec<f64>,
}

impl SolveTrace {
    pub fn last(&self) -> f64 {
        self.per_iteration.last().copied().unwrap_or(self.initial)
    }
}

/// Gauss–Seidel sweeps over `distance` then `collisions`, repeated
/// `config.iterations` times on the predicted positions, followed by the
/// velocity update. Positions are committed only if every coordinate is finite.
pub fn solve_step(
    state: &mut ParticleState,
    distance: &[DistanceConstraint],
    collisions: &[CollisionConstraint],
    config: &SolverConfig,
    frame: u64,
) -> Result<SolveTrace> {
    solve_step_with(state, distance, collisions, config, frame, Exec::default())
}

pub fn solve_step_with(
    state: &mut ParticleState,
    distance: &[DistanceConstraint],
    collisions: &[CollisionConstraint],
    config: &SolverConfig,
    frame: u64,
    exec: Exec,
) -> Result<SolveTrace> {
    let mut trace = SolveTrace {
        initial: max_violation(&state.predicted, distance, collisions),
        per_iteration: Vec::with_capacity(config.iterations),
    };
    let w = &state.inv_mass;
    let p = &mut state.predicted;
    for _ in 0..config.iterations {
        for c in distance {
            project_distance(c, p, w);
        }
        for c in collisions {
            project_collision(c, p, w);
        }
        trace
            .per_iteration
            .push(max_violation(p, distance, collisions));
    }
    if p.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
        return Err(Error::Instability { frame });
    }
    let (x, p) = (&state.positions, &state.predicted);
    let scale = config.damping / config.dt;
    exec.for_each_mut(&mut state.velocities, |i, v| *v = (p[i] - x[i]) * scale);
    state.positions.clone_from(&state.predicted);
    Ok(trace)
}

/// Predict and solve with structural constraints only.
pub fn step(
    state: &mut ParticleState,
    distance: &[DistanceConstraint],
    config: &SolverConfig,
    frame: u64,
) -> Result<SolveTrace> {
    predict(state, config);
    solve_step(state, distance, &[], config, frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::{Ball, TriRef};
    use crate::mesh::ObjectId;

    fn cfg(dt: f64, g: Vec3) -> SolverConfig {
        SolverConfig {
            dt,
            gravity: g,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn predict_examples() {
        let mut s = ParticleState::new(vec![Vec3::new(1.0, 2.0, 3.0)], vec![1.0]).unwrap();
        predict(&mut s, &cfg(0.1, Vec3::zeros()));
        assert_eq!(s.predicted[0], s.positions[0]);

        s.velocities[0] = Vec3::x();
        predict(&mut s, &cfg(0.1, Vec3::zeros()));
        assert!((s.predicted[0] - s.positions[0] - Vec3::new(0.1, 0.0, 0.0)).norm() < 1e-15);

        s.velocities[0] = Vec3::zeros();
        predict(&mut s, &cfg(0.1, Vec3::new(0.0, -10.0, 0.0)));
        assert!((s.predicted[0] - s.positions[0] - Vec3::new(0.0, -0.1, 0.0)).norm() < 1e-15);

        s.inv_mass[0] = 0.0;
        s.velocities[0] = Vec3::x();
        predict(&mut s, &cfg(0.1, Vec3::new(0.0, -10.0, 0.0)));
        assert_eq!(s.predicted[0], s.positions[0]);
    }

    #[test]
    fn distance_examples() {
        let c = DistanceConstraint::new(0, 1, 1.0, 1.0).unwrap();
        let mut p = vec![Vec3::zeros(), Vec3::new(2.0, 0.0, 0.0)];
        project_distance(&c, &mut p, &[1.0, 1.0]);
        assert_eq!(p, vec![Vec3::new(0.5, 0.0, 0.0), Vec3::new(1.5, 0.0, 0.0)]);

        let mut p = vec![Vec3::zeros(), Vec3::new(2.0, 0.0, 0.0)];
        project_distance(&c, &mut p, &[0.0, 1.0]);
        assert_eq!(p, vec![Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)]);

        let mut p = vec![Vec3::zeros(), Vec3::x()];
        project_distance(&c, &mut p, &[1.0, 1.0]);
        assert_eq!(p, vec![Vec3::zeros(), Vec3::x()]);

        assert!(DistanceConstraint::new(1, 1, 1.0, 1.0).is_err());
        assert!(DistanceConstraint::new(0, 1, 0.0, 1.0).is_err());
    }

    fn tri_at(center: Vec3) -> [Vec3; 3] {
        [
            center + Vec3::x(),
            center + Vec3::new(-0.5, 0.0, 0.8),
            center + Vec3::new(-0.5, 0.0, -0.8),
        ]
    }

    fn collision(depth: f64) -> (Vec<Vec3>, CollisionConstraint) {
        let (ca, cb) = (Vec3::zeros(), Vec3::new(0.0, 2.0 - depth, 0.0));
        let mut p = tri_at(ca).to_vec();
        p.extend(tri_at(cb));
        let c = Contact {
            tri_a: TriRef {
                object: ObjectId(0),
                tri: 0,
            },
            tri_b: TriRef {
                object: ObjectId(1),
                tri: 0,
            },
            normal: Vec3::y(),
            depth,
            point: (ca + cb) * 0.5,
            validated: true,
            ball_a: Ball {
                center: ca,
                radius: 1.0,
            },
            ball_b: Ball {
                center: cb,
                radius: 1.0,
            },
        };
        let cc = CollisionConstraint::new(c, [0, 1, 2], [3, 4, 5], &p);
        (p, cc)
    }

    #[test]
    fn collision_examples() {
        let (mut p, c) = collision(-0.1);
        let before = p.clone();
        project_collision(&c, &mut p, &[1.0; 6]);
        assert_eq!(p, before);

        // Side b pinned: side a takes the whole 0.1 along −normal.
        let (mut p, c) = collision(0.1);
        let before = p.clone();
        project_collision(&c, &mut p, &[1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        for i in 0..3 {
            assert!((p[i] - before[i] + Vec3::new(0.0, 0.1, 0.0)).norm() < 1e-12);
            assert_eq!(p[i + 3], before[i + 3]);
        }

        // Equal masses: each centroid moves 0.05 and the spheres end up touching.
        let (mut p, c) = collision(0.1);
        let before = p.clone();
        project_collision(&c, &mut p, &[1.0; 6]);
        let moved_a = centroid_of(&p, &[0, 1, 2]) - centroid_of(&before, &[0, 1, 2]);
        assert!((moved_a + Vec3::new(0.0, 0.05, 0.0)).norm() < 1e-12);
        assert!(c.value(&p).abs() < 1e-6);
    }

    #[test]
    fn solve_contracts_overstretched_edge() {
        let mut s = ParticleState::new(
            vec![Vec3::zeros(), Vec3::new(3.0, 0.0, 0.0)],
            vec![1.0, 1.0],
        )
        .unwrap();
        let c = [DistanceConstraint::new(0, 1, 1.0, 0.5).unwrap()];
        let trace = step(&mut s, &c, &cfg(0.01, Vec3::zeros()), 0).unwrap();
        assert_eq!(trace.per_iteration.len(), 10);
        assert!(trace.last() < trace.initial);
    }

    #[test]
    fn non_finite_positions_are_reported_with_frame() {
        let mut s = ParticleState::new(vec![Vec3::zeros()], vec![1.0]).unwrap();
        s.velocities[0] = Vec3::new(f64::INFINITY, 0.0, 0.0);
        let err = step(&mut s, &[], &SolverConfig::default(), 42).unwrap_err();
        assert!(matches!(err, Error::Instability { frame: 42 }));
    }

    #[test]
    fn hanging_chain_settles() {
        let n = 10;
        let pos: Vec<Vec3> = (0..n)
            .map(|i| Vec3::new(0.1 * i as f64, 0.0, 0.0))
            .collect();
        let mut w = vec![1.0; n];
        w[0] = 0.0;
        let mut s = ParticleState::new(pos, w).unwrap();
        let cons: Vec<_> = (0..n - 1)
            .map(|i| DistanceConstraint::new(i, i + 1, 0.1, 1.0).unwrap())
            .collect();
        let config = SolverConfig {
            iterations: 20,
            ..SolverConfig::default()
        };
        let mut last_move = f64::INFINITY;
        for f in 0..500 {
            let before = s.positions.clone();
            step(&mut s, &cons, &config, f).unwrap();
            last_move = before
                .iter()
                .zip(&s.positions)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
        }
        assert!(last_move < 1e-4, "still moving {last_move}");
        assert_eq!(s.positions[0], Vec3::zeros());
    }
}
