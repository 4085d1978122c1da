use crate::error::MeshError;
use crate::meshcore::primal::{EdgeTable, PrimalMesh, Tag};

/// The part of a dual cell lying inside one primal triangle: the
/// sub-triangle spanned by a primal edge and the triangle barycenter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Half {
    pub triangle: usize,
    pub local_edge: usize,
}

/// Control volume attached to one primal edge.
///
/// Interior cells glue the two halves on either side of the edge. Boundary
/// cells consist of a single half. A pair of periodic boundary edges yields
/// one cell with two halves lying on opposite sides of the seam.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCell {
    pub halves: Vec<Half>,
    /// Generating primal edges (two for a periodic pair).
    pub primal_edges: Vec<usize>,
    /// Index into `PrimalMesh::boundary_edges` for non-periodic boundary cells.
    pub boundary_edge: Option<usize>,
    pub tag: Option<Tag>,
}

impl DualCell {
    pub fn is_boundary(&self) -> bool {
        self.boundary_edge.is_some()
    }
}

/// Segment from a triangle barycenter to one of its vertices, shared by the
/// dual cells of the two triangle edges meeting at that vertex.
///
/// The stored orientation is outward from `cells[0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteriorFace {
    pub cells: [usize; 2],
    pub triangle: usize,
    /// Local vertex index (0..3) in the triangle.
    pub vertex: usize,
}

/// Primal boundary edge seen as the outer face of its dual cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryFace {
    pub cell: usize,
    pub boundary_edge: usize,
    pub tag: Tag,
    pub triangle: usize,
    pub local_edge: usize,
}

#[derive(Debug, Clone)]
pub struct DualMesh {
    pub cells: Vec<DualCell>,
    /// Dual cell of each local edge of each triangle.
    pub triangle_cells: Vec<[usize; 3]>,
    pub faces: Vec<InteriorFace>,
    pub boundary_faces: Vec<BoundaryFace>,
    /// Interior faces touching each cell.
    pub cell_faces: Vec<Vec<usize>>,
    /// Boundary faces touching each cell (at most one).
    pub cell_boundary_faces: Vec<Vec<usize>>,
    /// Pressure degree of freedom of each primal vertex.
    pub vertex_dofs: Vec<usize>,
    pub n_pressure_dofs: usize,
    pub edges: EdgeTable,
}

impl DualMesh {
    pub fn build(primal: &PrimalMesh) -> Result<Self, MeshError> {
        let edges = primal.edge_table()?;
        let mut boundary_of_edge = vec![None; edges.len()];
        for (b, be) in primal.boundary_edges.iter().enumerate() {
            let [u, v] = be.vertices;
            let e = edges.find(u, v).ok_or(MeshError::NotABoundaryEdge(u, v))?;
            boundary_of_edge[e] = Some(b);
        }
        let mut partner_of_boundary = vec![None; primal.boundary_edges.len()];
        for pair in &primal.periodic_pairs {
            partner_of_boundary[pair.second] = Some(pair.first);
            partner_of_boundary[pair.first] = Some(pair.first);
        }

        // Cell numbering follows primal edge numbering; the second edge of a
        // periodic pair joins the cell of the first.
        let mut cell_of_edge = vec![usize::MAX; edges.len()];
        let mut cells: Vec<DualCell> = Vec::with_capacity(edges.len());
        let mut cell_of_boundary = vec![usize::MAX; primal.boundary_edges.len()];
        for e in 0..edges.len() {
            let periodic_root = boundary_of_edge[e].and_then(|b| partner_of_boundary[b]);
            match periodic_root {
                Some(root) if cell_of_boundary[root] != usize::MAX => {
                    let c = cell_of_boundary[root];
                    cell_of_edge[e] = c;
                    cells[c].primal_edges.push(e);
                }
                _ => {
                    let c = cells.len();
                    let boundary_edge = if periodic_root.is_some() { None } else { boundary_of_edge[e] };
                    cells.push(DualCell {
                        halves: Vec::with_capacity(2),
                        primal_edges: vec![e],
                        boundary_edge,
                        tag: boundary_edge.map(|b| primal.boundary_edges[b].tag),
                    });
                    cell_of_edge[e] = c;
                    if let Some(root) = periodic_root {
                        cell_of_boundary[root] = c;
                    }
                }
            }
        }
        for (e, inc) in edges.incident.iter().enumerate() {
            for &(triangle, local_edge) in inc {
                cells[cell_of_edge[e]].halves.push(Half { triangle, local_edge });
            }
        }
        for (c, cell) in cells.iter().enumerate() {
            if cell.halves.is_empty() || cell.halves.len() > 2 {
                return Err(MeshError::Malformed(format!("dual cell {c} has {} halves", cell.halves.len())));
            }
        }

        let triangle_cells: Vec<[usize; 3]> = edges
            .triangle_edges
            .iter()
            .map(|te| [cell_of_edge[te[0]], cell_of_edge[te[1]], cell_of_edge[te[2]]])
            .collect();

        let mut faces = Vec::with_capacity(3 * primal.triangles.len());
        let mut cell_faces = vec![Vec::with_capacity(4); cells.len()];
        for (k, tc) in triangle_cells.iter().enumerate() {
            for m in 0..3 {
                let a = tc[(m + 2) % 3];
                let b = tc[m];
                if a == b {
                    return Err(MeshError::Malformed(format!(
                        "triangle {k}: two local edges map to the same dual cell (periodic seam too close)"
                    )));
                }
                let f = faces.len();
                faces.push(InteriorFace {
                    cells: [a, b],
                    triangle: k,
                    vertex: m,
                });
                cell_faces[a].push(f);
                cell_faces[b].push(f);
            }
        }

        let mut boundary_faces = Vec::new();
        let mut cell_boundary_faces = vec![Vec::new(); cells.len()];
        for (c, cell) in cells.iter().enumerate() {
            if let Some(b) = cell.boundary_edge {
                let h = cell.halves[0];
                cell_boundary_faces[c].push(boundary_faces.len());
                boundary_faces.push(BoundaryFace {
                    cell: c,
                    boundary_edge: b,
                    tag: primal.boundary_edges[b].tag,
                    triangle: h.triangle,
                    local_edge: h.local_edge,
                });
            }
        }

        let (vertex_dofs, n_pressure_dofs) = primal.vertex_dofs();
        Ok(Self {
            cells,
            triangle_cells,
            faces,
            boundary_faces,
            cell_faces,
            cell_boundary_faces,
            vertex_dofs,
            n_pressure_dofs,
            edges,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Neighbor set K_i: the cell on the other side of each interior face.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.cell_faces[i].iter().map(move |&f| {
            let [a, b] = self.faces[f].cells;
            if a == i {
                b
            } else {
                a
            }
        })
    }
}
