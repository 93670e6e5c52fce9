use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(
        "triangle {triangle} references vertex {vertex}, but the mesh has {vertex_count} vertices"
    )]
    IndexOutOfRange {
        triangle: usize,
        vertex: usize,
        vertex_count: usize,
    },

    #[error("triangle {triangle} is degenerate (area {area:e} m²)")]
    DegenerateTriangle { triangle: usize, area: f64 },

    #[error("edge ({a}, {b}) is shared by {count} triangles")]
    NonManifoldEdge { a: usize, b: usize, count: usize },

    #[error("points are collinear; no circumcircle exists")]
    Collinear,

    #[error("dual vertex {0} has a degenerate fan (zero area)")]
    DegenerateFan(usize),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("obstacle mesh of object {0} is not closed")]
    OpenObstacle(usize),

    #[error("solver instability (non-finite position) at frame {frame}")]
    Instability { frame: u64 },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }
}
