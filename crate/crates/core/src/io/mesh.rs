//! Text mesh format.
//!
//! ```text
//! NV NT NB
//! x y            (NV lines)
//! v1 v2 v3       (NT lines, 1-based, counterclockwise)
//! v1 v2 tag      (NB lines, 1-based)
//! ```
//!
//! Blank lines and `#` comments are skipped. Periodic pairing is not part of
//! the file.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, MeshError, Result};
use crate::meshcore::{BoundaryEdge, PrimalMesh};
use crate::Vec2;

pub fn read_mesh(path: &Path) -> Result<PrimalMesh> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text, &path.display().to_string())
}

/// Parses mesh text; `name` labels diagnostics.
pub fn parse_mesh(text: &str, name: &str) -> Result<PrimalMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, message: String| Error::Parse {
        path: name.to_string(),
        line,
        message,
    };
    let (hl, header) = lines.next().ok_or_else(|| err(1, "empty mesh file".into()))?;
    let counts = fields::<usize>(header, 3).map_err(|m| err(hl, format!("header: {m}")))?;
    let (nv, nt, nb) = (counts[0], counts[1], counts[2]);

    let last = text.lines().count().max(1);
    let mut next = |what: &str, k: usize| lines.next().ok_or_else(|| err(last, format!("file ends before {what} {}", k + 1)));
    let mut vertices = Vec::with_capacity(nv);
    let mut tri_lines = Vec::with_capacity(nt);
    let mut edge_lines = Vec::with_capacity(nb);
    for k in 0..nv {
        let (ln, l) = next("vertex", k)?;
        let x = fields::<f64>(l, 2).map_err(|m| err(ln, format!("vertex {}: {m}", k + 1)))?;
        if !x.iter().all(|v| v.is_finite()) {
            return Err(err(ln, format!("vertex {} has a non-finite coordinate", k + 1)));
        }
        vertices.push(Vec2::new(x[0], x[1]));
    }
    let index = |ln: usize, v: usize| {
        if v == 0 || v > nv {
            Err(err(ln, format!("vertex index {v} outside 1..={nv}")))
        } else {
            Ok(v - 1)
        }
    };
    let mut triangles = Vec::with_capacity(nt);
    for k in 0..nt {
        let (ln, l) = next("triangle", k)?;
        let v = fields::<usize>(l, 3).map_err(|m| err(ln, format!("triangle {}: {m}", k + 1)))?;
        triangles.push([index(ln, v[0])?, index(ln, v[1])?, index(ln, v[2])?]);
        tri_lines.push(ln);
    }
    let mut boundary_edges = Vec::with_capacity(nb);
    for k in 0..nb {
        let (ln, l) = next("boundary edge", k)?;
        let v = fields::<u64>(l, 3).map_err(|m| err(ln, format!("boundary edge {}: {m}", k + 1)))?;
        let tag = u32::try_from(v[2]).map_err(|_| err(ln, format!("tag {} does not fit in 32 bits", v[2])))?;
        boundary_edges.push(BoundaryEdge {
            vertices: [index(ln, v[0] as usize)?, index(ln, v[1] as usize)?],
            tag,
        });
        edge_lines.push(ln);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(err(ln, "unexpected content after the last boundary edge".into()));
    }

    let edge_line = |a: usize, b: usize| {
        boundary_edges
            .iter()
            .position(|e| e.vertices == [a, b] || e.vertices == [b, a])
            .map(|k| edge_lines[k])
    };
    let tri_line = |a: usize, b: usize| triangles.iter().position(|t| t.contains(&a) && t.contains(&b)).map(|k| tri_lines[k]);
    PrimalMesh::new(vertices.clone(), triangles.clone(), boundary_edges.clone()).map_err(|e| {
        let line = match e {
            MeshError::NegativeArea { triangle, .. } | MeshError::VertexOutOfRange { triangle, .. } => Some(tri_lines[triangle]),
            MeshError::DegenerateFace(triangle) => Some(tri_lines[triangle]),
            MeshError::DuplicateTag(a, b) | MeshError::NotABoundaryEdge(a, b) => edge_line(a, b),
            MeshError::NonManifoldEdge(a, b) => tri_line(a, b),
            _ => None,
        };
        match line {
            Some(line) => err(line, e.to_string()),
            None => Error::Mesh(e),
        }
    })
}

fn fields<T: std::str::FromStr>(line: &str, n: usize) -> std::result::Result<Vec<T>, String> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != n {
        return Err(format!("expected {n} fields, found {}", parts.len()));
    }
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| format!("cannot parse '{p}'")))
        .collect()
}

/// Text form of a mesh. Coordinates use the shortest exact representation,
/// so reading the output back gives an identical mesh.
pub fn format_mesh(mesh: &PrimalMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {} {}", mesh.vertices.len(), mesh.triangles.len(), mesh.boundary_edges.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{:?} {:?}", v.x, v.y);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "{} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    for e in &mesh.boundary_edges {
        let _ = writeln!(s, "{} {} {}", e.vertices[0] + 1, e.vertices[1] + 1, e.tag);
    }
    s
}

pub fn write_mesh(mesh: &PrimalMesh, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, format_mesh(mesh))?)
}
