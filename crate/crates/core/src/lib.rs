//! Curvature-adaptive circumsphere collision detection for deformable
//! triangle meshes, with a position-based dynamics solver and an
//! experiment harness.
//!
//! The pipeline per frame: predict particle positions, refresh triangle
//! circumspheres lazily, cull object pairs by bounding spheres, test
//! circumsphere overlap, keep contacts inside the normal safety cones, and
//! project collision and distance constraints.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detect;
pub mod error;
pub mod exec;
pub mod geom;
pub mod harness;
pub mod mesh;
pub mod pbd;
pub mod sphere;

pub use error::{Error, Result};
pub use exec::Exec;
pub use geom::Vec3;
