//! Scene files and the experiments run over them.

mod metrics;
mod scene;
mod sim;
mod sweep;
mod tunneling;

pub use metrics::{
    stability_metric, write_deterministic_csv, write_metrics_csv, FrameMetrics,
    DETERMINISTIC_HEADER, METRICS_HEADER,
};
pub use scene::{
    generate_scene, ObjectSpec, Obstacle, ObstacleSpec, Pinned, SceneConfig, SphereOverrides,
    World, CANONICAL_SCENES,
};
pub use sim::{deterministic_path, run_scene, run_scene_with, with_method, write_run, Simulation};
pub use sweep::{
    compare, compare_with, sweep_d, sweep_d_with, write_compare_csv, write_sweep_csv, CompareRow,
    SweepRow, COMPARE_HEADER, DEFAULT_D_VALUES, SWEEP_HEADER,
};
pub use tunneling::{inside, inside_closed_mesh, tunneling_check};
