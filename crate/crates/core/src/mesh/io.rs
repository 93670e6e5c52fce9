//! Plain-text mesh format: `v x y z` and `f i j k` lines (1-based indices),
//! `#` comments, triangles only.

use std::fmt::Write as _;
use std::path::Path;

use super::{build_adjacency, ObjectId, TriangleMesh};
use crate::error::{Error, Result};
use crate::geom::Vec3;

pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    parse_mesh(&text)
}

/// Parses the text format and checks the mesh is manifold.
pub fn parse_mesh(text: &str) -> Result<TriangleMesh> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let line_no = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let mut fields = line.split_whitespace();
        let tag = fields.next().unwrap_or_default();
        let rest: Vec<&str> = fields.collect();
        match tag {
            "v" => {
                if rest.len() != 3 {
                    return Err(parse_err(format!(
                        "vertex needs 3 coordinates, got {}",
                        rest.len()
                    )));
                }
                let mut xyz = [0.0; 3];
                for (slot, s) in xyz.iter_mut().zip(&rest) {
                    *slot = s
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| parse_err(format!("bad coordinate `{s}`")))?;
                }
                vertices.push(Vec3::from(xyz));
            }
            "f" => {
                if rest.len() != 3 {
                    return Err(parse_err(format!(
                        "only triangles are supported, face has {} vertices",
                        rest.len()
                    )));
                }
                let mut tri = [0usize; 3];
                for (slot, s) in tri.iter_mut().zip(&rest) {
                    let idx: usize = s
                        .parse()
                        .map_err(|_| parse_err(format!("bad vertex index `{s}`")))?;
                    if idx == 0 {
                        return Err(parse_err("vertex indices are 1-based".into()));
                    }
                    *slot = idx - 1;
                }
                triangles.push(tri);
            }
            other => return Err(parse_err(format!("unknown record `{other}`"))),
        }
    }

    let mesh = TriangleMesh::new(vertices, triangles, ObjectId::default())?;
    build_adjacency(&mesh)?;
    Ok(mesh)
}

pub fn write_mesh(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}
