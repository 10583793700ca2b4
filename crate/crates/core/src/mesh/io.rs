//! JSON mesh files:
//!
//! ```text
//! { "vertices": [[x, y, z], ...],
//!   "faces": [[v0, v1, v2, ...], ...],      // 0-based vertex loops
//!   "cells": [[+f, -g, ...], ...] }         // 1-based signed face indices
//! ```
//!
//! A positive cell entry means the stored face normal points out of the cell.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;
use serde::Deserialize;

use super::{validate_mesh, PolyMesh, SignedFace};
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshFile {
    vertices: Vec<[f64; 3]>,
    faces: Vec<Vec<usize>>,
    cells: Vec<Vec<i64>>,
}

/// Parses mesh text and validates it; any violated invariant fails the parse.
pub fn parse_mesh(text: &str) -> Result<PolyMesh> {
    let file: MeshFile = serde_json::from_str(text).map_err(|e| Error::MalformedFile {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let cells = file
        .cells
        .iter()
        .enumerate()
        .map(|(c, refs)| {
            refs.iter()
                .map(|&r| {
                    if r == 0 {
                        return Err(Error::InvalidArgument(format!(
                            "cell {c} uses face index 0; face references are 1-based"
                        )));
                    }
                    Ok(SignedFace {
                        face: (r.unsigned_abs() - 1) as usize,
                        sign: if r > 0 { 1 } else { -1 },
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let vertices = file.vertices.iter().map(|p| Vector3::new(p[0], p[1], p[2])).collect();
    let mesh = PolyMesh::from_parts(vertices, file.faces, cells)?;
    validate_mesh(&mesh).into_result(&mesh)?;
    Ok(mesh)
}

pub fn load_mesh<P: AsRef<Path>>(path: P) -> Result<PolyMesh> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

/// Serializes a mesh; floats are written in shortest round-trip form.
pub fn write_mesh(mesh: &PolyMesh) -> String {
    let mut out = String::from("{\n  \"vertices\": [\n");
    let join = |items: Vec<String>| items.join(", ");
    for (i, p) in mesh.vertices().iter().enumerate() {
        let sep = if i + 1 < mesh.num_vertices() { "," } else { "" };
        let _ = writeln!(out, "    [{:?}, {:?}, {:?}]{sep}", p.x, p.y, p.z);
    }
    out.push_str("  ],\n  \"faces\": [\n");
    for (i, lp) in mesh.faces().iter().enumerate() {
        let sep = if i + 1 < mesh.num_faces() { "," } else { "" };
        let _ = writeln!(out, "    [{}]{sep}", join(lp.iter().map(|v| v.to_string()).collect()));
    }
    out.push_str("  ],\n  \"cells\": [\n");
    for (i, cell) in mesh.cells().iter().enumerate() {
        let sep = if i + 1 < mesh.num_cells() { "," } else { "" };
        let refs = cell
            .iter()
            .map(|sf| (i64::from(sf.sign) * (sf.face as i64 + 1)).to_string())
            .collect();
        let _ = writeln!(out, "    [{}]{sep}", join(refs));
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn save_mesh<P: AsRef<Path>>(mesh: &PolyMesh, path: P) -> Result<()> {
    std::fs::write(path, write_mesh(mesh))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_cube_mesh, Aabb};

    #[test]
    fn round_trip() {
        let m = generate_cube_mesh(2, Aabb::unit()).unwrap();
        let back = parse_mesh(&write_mesh(&m)).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.faces(), m.faces());
        assert_eq!(back.cells(), m.cells());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let text = "{\n  \"vertices\": [[0, 0, 0],\n  [1, 0 0]]\n}";
        match parse_mesh(text) {
            Err(Error::MalformedFile { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_face_reference_is_rejected() {
        let text = r#"{"vertices": [], "faces": [], "cells": [[0]]}"#;
        assert!(matches!(parse_mesh(text), Err(Error::InvalidArgument(_))));
    }
}
