//! Legacy ASCII VTK output.
//!
//! Points are the primal vertices followed by one node per dual cell. Cells
//! are the primal triangles followed by one `VTK_VERTEX` per dual node, so
//! both arrays below cover every point and every cell:
//! - `pressure` (point data): vertex values, P1-interpolated at dual nodes
//! - `momentum_node` (point data): dual-cell momentum at its node; at a
//!   primal vertex, the mean over incident triangles of the CR interpolant
//! - `momentum_cell` (cell data): CR interpolant at each triangle barycenter
//!   (mean of its three edge cells), and the cell value on vertex cells

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::meshcore::Meshes;
use crate::transport::field::cell;
use crate::Vec2;

const VTK_TRIANGLE: u8 = 5;
const VTK_VERTEX: u8 = 1;

/// Momentum at every primal vertex from the CR interpolant averaged over the
/// incident triangles, with periodic images of a vertex counted together. At
/// vertex `l` the CR value is `W_a + W_b - W_opp`.
pub fn vertex_momentum(w: &[f64], meshes: &Meshes) -> Vec<Vec2> {
    let dofs = &meshes.dual.vertex_dofs;
    let nd = meshes.dual.n_pressure_dofs;
    let mut acc = vec![Vec2::zeros(); nd];
    let mut count = vec![0usize; nd];
    for (k, t) in meshes.primal.triangles.iter().enumerate() {
        let tc = meshes.dual.triangle_cells[k];
        for l in 0..3 {
            // local edge l joins vertices l and l + 1, so the edge opposite
            // vertex l is edge l + 1
            let opp = tc[(l + 1) % 3];
            acc[dofs[t[l]]] += cell(w, tc[l]) + cell(w, tc[(l + 2) % 3]) - cell(w, opp);
            count[dofs[t[l]]] += 1;
        }
    }
    dofs.iter()
        .map(|&d| if count[d] > 0 { acc[d] / count[d] as f64 } else { acc[d] })
        .collect()
}

fn node_pressure(p: &[f64], meshes: &Meshes) -> Vec<f64> {
    let dofs = &meshes.dual.vertex_dofs;
    meshes
        .dual
        .cells
        .iter()
        .map(|c| {
            let [a, b] = meshes.dual.edges.edges[c.primal_edges[0]];
            0.5 * (p[dofs[a]] + p[dofs[b]])
        })
        .collect()
}

/// File contents for momentum `w` and vertex-dof pressure `p` at time `t`.
pub fn format_vtk(meshes: &Meshes, w: &[f64], p: &[f64], t: f64) -> Result<String> {
    let nv = meshes.primal.vertices.len();
    let nc = meshes.n_cells();
    let nt = meshes.primal.triangles.len();
    if w.len() != 2 * nc || p.len() != meshes.dual.n_pressure_dofs {
        return Err(Error::InvalidArgument(format!(
            "field sizes {} and {} do not match {nc} dual cells and {} pressure dofs",
            w.len(),
            p.len(),
            meshes.dual.n_pressure_dofs
        )));
    }
    let mut s = String::new();
    let e = |v: f64| format!("{v:.10e}");
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "staggered-ns t = {}", e(t));
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", nv + nc);
    for x in meshes.primal.vertices.iter().chain(&meshes.geometry.node_position) {
        let _ = writeln!(s, "{} {} {}", e(x.x), e(x.y), e(0.0));
    }
    let _ = writeln!(s, "CELLS {} {}", nt + nc, 4 * nt + 2 * nc);
    for tri in &meshes.primal.triangles {
        let _ = writeln!(s, "3 {} {} {}", tri[0], tri[1], tri[2]);
    }
    for i in 0..nc {
        let _ = writeln!(s, "1 {}", nv + i);
    }
    let _ = writeln!(s, "CELL_TYPES {}", nt + nc);
    for _ in 0..nt {
        let _ = writeln!(s, "{VTK_TRIANGLE}");
    }
    for _ in 0..nc {
        let _ = writeln!(s, "{VTK_VERTEX}");
    }

    let _ = writeln!(s, "POINT_DATA {}", nv + nc);
    let _ = writeln!(s, "SCALARS pressure double 1");
    let _ = writeln!(s, "LOOKUP_TABLE default");
    let dofs = &meshes.dual.vertex_dofs;
    for v in (0..nv).map(|v| p[dofs[v]]).chain(node_pressure(p, meshes)) {
        let _ = writeln!(s, "{}", e(v));
    }
    let _ = writeln!(s, "VECTORS momentum_node double");
    for u in vertex_momentum(w, meshes).into_iter().chain((0..nc).map(|i| cell(w, i))) {
        let _ = writeln!(s, "{} {} {}", e(u.x), e(u.y), e(0.0));
    }

    let _ = writeln!(s, "CELL_DATA {}", nt + nc);
    let _ = writeln!(s, "VECTORS momentum_cell double");
    let tri_mean = meshes
        .dual
        .triangle_cells
        .iter()
        .map(|tc| (cell(w, tc[0]) + cell(w, tc[1]) + cell(w, tc[2])) / 3.0);
    for u in tri_mean.chain((0..nc).map(|i| cell(w, i))) {
        let _ = writeln!(s, "{} {} {}", e(u.x), e(u.y), e(0.0));
    }
    Ok(s)
}

pub fn write_vtk(path: &Path, meshes: &Meshes, w: &[f64], p: &[f64], t: f64) -> Result<()> {
    Ok(std::fs::write(path, format_vtk(meshes, w, p, t)?)?)
}
