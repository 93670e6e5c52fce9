use std::io::Write;

use serde::Serialize;

use super::metrics::{write_rows, FrameMetrics};
use super::scene::SceneConfig;
use super::sim::{run_scene_with, with_method};
use crate::detect::Method;
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Default grid of update thresholds.
pub const DEFAULT_D_VALUES: [f64; 6] = [0.0, 0.3, 0.7, 0.9, 1.5, 2.0];

pub const SWEEP_HEADER: &str = "d,mean_rebuild_count,mean_detect_time_s,mean_stability_m";

pub const COMPARE_HEADER: &str =
    "method,mean_detect_time_s,mean_solve_time_s,mean_raw_contacts,mean_validated_contacts,mean_stability_m,final_tunneled_vertices";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: f64,
    pub mean_rebuild_count: f64,
    #[serde(rename = "mean_detect_time_s")]
    pub mean_detect_time: f64,
    #[serde(rename = "mean_stability_m")]
    pub mean_stability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub method: &'static str,
    #[serde(rename = "mean_detect_time_s")]
    pub mean_detect_time: f64,
    #[serde(rename = "mean_solve_time_s")]
    pub mean_solve_time: f64,
    pub mean_raw_contacts: f64,
    pub mean_validated_contacts: f64,
    #[serde(rename = "mean_stability_m")]
    pub mean_stability: f64,
    #[serde(rename = "final_tunneled_vertices")]
    pub final_tunneled: usize,
}

fn mean(rows: &[FrameMetrics], f: impl Fn(&FrameMetrics) -> f64) -> f64 {
    if rows.is_empty() {
        0.0
    } else {
        rows.iter().map(f).sum::<f64>() / rows.len() as f64
    }
}

/// Mean stability over frames that had contacts; 0 when none did.
fn mean_contact_stability(rows: &[FrameMetrics]) -> f64 {
    let with: Vec<_> = rows
        .iter()
        .filter(|r| r.validated_contacts > 0)
        .copied()
        .collect();
    mean(&with, |r| r.stability)
}

/// Runs the scene once per update threshold, one after another so that
/// timings do not compete for cores.
pub fn sweep_d(config: &SceneConfig, d_values: &[f64]) -> Result<Vec<SweepRow>> {
    sweep_d_with(config, d_values, Exec::default())
}

pub fn sweep_d_with(config: &SceneConfig, d_values: &[f64], exec: Exec) -> Result<Vec<SweepRow>> {
    if d_values.is_empty() || d_values.iter().any(|d| !(*d >= 0.0)) {
        return Err(Error::config("sweep needs non-negative d values"));
    }
    d_values
        .iter()
        .map(|&d| {
            let mut c = config.clone();
            c.sphere.update_threshold_d = Some(d);
            let rows = run_scene_with(&c, None, exec)?;
            Ok(SweepRow {
                d,
                mean_rebuild_count: mean(&rows, |r| r.rebuild_count as f64),
                mean_detect_time: mean(&rows, |r| r.detect_time),
                mean_stability: mean_contact_stability(&rows),
            })
        })
        .collect()
}

/// Runs the scene once per detection method.
pub fn compare(config: &SceneConfig, methods: &[Method]) -> Result<Vec<CompareRow>> {
    compare_with(config, methods, Exec::default())
}

pub fn compare_with(
    config: &SceneConfig,
    methods: &[Method],
    exec: Exec,
) -> Result<Vec<CompareRow>> {
    methods
        .iter()
        .map(|&m| {
            let rows = run_scene_with(&with_method(config, m), None, exec)?;
            Ok(CompareRow {
                method: m.name(),
                mean_detect_time: mean(&rows, |r| r.detect_time),
                mean_solve_time: mean(&rows, |r| r.solve_time),
                mean_raw_contacts: mean(&rows, |r| r.raw_contacts as f64),
                mean_validated_contacts: mean(&rows, |r| r.validated_contacts as f64),
                mean_stability: mean_contact_stability(&rows),
                final_tunneled: rows.last().map_or(0, |r| r.tunneled_vertices),
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    write_rows(out, SWEEP_HEADER, rows)
}

pub fn write_compare_csv<W: Write>(out: W, rows: &[CompareRow]) -> Result<()> {
    write_rows(out, COMPARE_HEADER, rows)
}
