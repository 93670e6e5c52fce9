use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::geom::Vec3;

/// Exact header of the metrics CSV.
pub const METRICS_HEADER: &str =
    "frame,detect_time_s,solve_time_s,rebuild_count,raw_contacts,validated_contacts,stability_m,tunneled_vertices";

/// Header of the companion CSV that omits wall-clock columns.
pub const DETERMINISTIC_HEADER: &str =
    "frame,rebuild_count,raw_contacts,validated_contacts,stability_m,tunneled_vertices";

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FrameMetrics {
    pub frame: u64,
    #[serde(rename = "detect_time_s")]
    pub detect_time: f64,
    #[serde(rename = "solve_time_s")]
    pub solve_time: f64,
    pub rebuild_count: usize,
    pub raw_contacts: usize,
    pub validated_contacts: usize,
    #[serde(rename = "stability_m")]
    pub stability: f64,
    pub tunneled_vertices: usize,
}

#[derive(Serialize)]
struct DeterministicRow {
    frame: u64,
    rebuild_count: usize,
    raw_contacts: usize,
    validated_contacts: usize,
    stability_m: f64,
    tunneled_vertices: usize,
}

impl From<&FrameMetrics> for DeterministicRow {
    fn from(m: &FrameMetrics) -> Self {
        DeterministicRow {
            frame: m.frame,
            rebuild_count: m.rebuild_count,
            raw_contacts: m.raw_contacts,
            validated_contacts: m.validated_contacts,
            stability_m: m.stability,
            tunneled_vertices: m.tunneled_vertices,
        }
    }
}

/// Serializes rows as CSV with a header line, even when `rows` is empty.
pub(crate) fn write_rows<W: Write, T: Serialize>(
    out: W,
    header: &str,
    rows: impl IntoIterator<Item = T>,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(header.split(','))
        .and_then(|_| rows.into_iter().try_for_each(|r| w.serialize(r)))
        .map_err(std::io::Error::from)?;
    w.flush()?;
    Ok(())
}

pub fn write_metrics_csv<W: Write>(out: W, rows: &[FrameMetrics]) -> Result<()> {
    write_rows(out, METRICS_HEADER, rows)
}

/// Same rows without timing columns; byte-identical across runs of one config.
pub fn write_deterministic_csv<W: Write>(out: W, rows: &[FrameMetrics]) -> Result<()> {
    write_rows(
        out,
        DETERMINISTIC_HEADER,
        rows.iter().map(DeterministicRow::from),
    )
}

/// Mean `|x_t − x_{t−1}|` over `vertices`; 0 when there are none.
pub fn stability_metric(previous: &[Vec3], current: &[Vec3], vertices: &[usize]) -> f64 {
    if vertices.is_empty() {
        return 0.0;
    }
    let total: f64 = vertices
        .iter()
        .map(|&v| (current[v] - previous[v]).norm())
        .sum();
    total / vertices.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stability_examples() {
        let p = vec![Vec3::zeros(), Vec3::x()];
        assert_eq!(stability_metric(&p, &p, &[0, 1]), 0.0);
        assert_eq!(stability_metric(&p, &p, &[]), 0.0);
        let up = vec![Vec3::new(0.0, 0.01, 0.0)];
        let down = vec![Vec3::new(0.0, -0.01, 0.0)];
        assert!((stability_metric(&up, &down, &[0]) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn csv_headers() {
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{METRICS_HEADER}\n")
        );

        let row = FrameMetrics {
            frame: 1,
            rebuild_count: 2,
            stability: 0.5,
            ..FrameMetrics::default()
        };
        let mut buf = Vec::new();
        write_deterministic_csv(&mut buf, &[row]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{DETERMINISTIC_HEADER}\n1,2,0,0,0.5,0\n")
        );
    }
}
