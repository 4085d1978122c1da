use std::collections::{BTreeSet, HashMap};

use crate::error::MeshError;
use crate::Vec2;

/// Integer label attached to boundary edges.
pub type Tag = u32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: Tag,
}

/// Two boundary edges identified through a periodic seam.
///
/// `second` is the image of `first` under translation by `offset`. Both
/// indices refer to [`PrimalMesh::boundary_edges`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicPair {
    pub first: usize,
    pub second: usize,
    pub offset: Vec2,
}

/// Unique undirected edges of a triangulation.
///
/// Local edge `l` of a triangle joins its vertices `l` and `(l + 1) % 3`.
#[derive(Debug, Clone)]
pub struct EdgeTable {
    pub edges: Vec<[usize; 2]>,
    /// Incident `(triangle, local edge)` pairs, one or two per edge.
    pub incident: Vec<Vec<(usize, usize)>>,
    pub triangle_edges: Vec<[usize; 3]>,
    lookup: HashMap<(usize, usize), usize>,
}

impl EdgeTable {
    pub fn find(&self, a: usize, b: usize) -> Option<usize> {
        self.lookup.get(&key(a, b)).copied()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Counterclockwise triangulation carrying pressure at its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalMesh {
    pub vertices: Vec<Vec2>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub periodic_pairs: Vec<PeriodicPair>,
}

impl PrimalMesh {
    /// Builds and validates a mesh without periodic pairs.
    pub fn new(
        vertices: Vec<Vec2>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self, MeshError> {
        let mesh = Self {
            vertices,
            triangles,
            boundary_edges,
            periodic_pairs: Vec::new(),
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn signed_area(&self, k: usize) -> f64 {
        let [a, b, c] = self.triangles[k];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * ((pb - pa).perp(&(pc - pa)))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|k| self.signed_area(k)).sum()
    }

    pub fn tags(&self) -> BTreeSet<Tag> {
        self.boundary_edges.iter().map(|e| e.tag).collect()
    }

    pub fn edge_table(&self) -> Result<EdgeTable, MeshError> {
        let mut lookup = HashMap::with_capacity(self.triangles.len() * 2);
        let mut edges = Vec::new();
        let mut incident: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(self.triangles.len());
        for (k, tri) in self.triangles.iter().enumerate() {
            let mut local = [0; 3];
            for l in 0..3 {
                let (a, b) = (tri[l], tri[(l + 1) % 3]);
                let e = *lookup.entry(key(a, b)).or_insert_with(|| {
                    edges.push([a, b]);
                    incident.push(Vec::with_capacity(2));
                    edges.len() - 1
                });
                incident[e].push((k, l));
                if incident[e].len() > 2 {
                    return Err(MeshError::NonManifoldEdge(a, b));
                }
                local[l] = e;
            }
            triangle_edges.push(local);
        }
        Ok(EdgeTable {
            edges,
            incident,
            triangle_edges,
            lookup,
        })
    }

    /// Checks orientation, manifoldness and boundary tagging.
    pub fn validate(&self) -> Result<(), MeshError> {
        let nv = self.vertices.len();
        for (k, tri) in self.triangles.iter().enumerate() {
            if let Some(&index) = tri.iter().find(|&&v| v >= nv) {
                return Err(MeshError::VertexOutOfRange { triangle: k, index });
            }
            let area = self.signed_area(k);
            if !(area > 0.0) {
                return Err(MeshError::NegativeArea { triangle: k, area });
            }
        }
        let table = self.edge_table()?;
        let mut tagged = vec![false; table.len()];
        for be in &self.boundary_edges {
            let [a, b] = be.vertices;
            let e = table.find(a, b).ok_or(MeshError::NotABoundaryEdge(a, b))?;
            if table.incident[e].len() != 1 {
                return Err(MeshError::NotABoundaryEdge(a, b));
            }
            if tagged[e] {
                return Err(MeshError::DuplicateTag(a, b));
            }
            tagged[e] = true;
        }
        for (e, inc) in table.incident.iter().enumerate() {
            if inc.len() == 1 && !tagged[e] {
                let [a, b] = table.edges[e];
                return Err(MeshError::UntaggedBoundaryEdge(a, b));
            }
        }
        Ok(())
    }

    /// Pairs every boundary edge tagged `tag_a` with the edge tagged `tag_b`
    /// found at `offset` from it. Returns the number of pairs added.
    pub fn pair_periodic(&mut self, tag_a: Tag, tag_b: Tag, offset: Vec2) -> Result<usize, MeshError> {
        if tag_a == tag_b {
            return Err(MeshError::Periodic(format!("tag {tag_a} paired with itself")));
        }
        let already: BTreeSet<usize> = self
            .periodic_pairs
            .iter()
            .flat_map(|p| [p.first, p.second])
            .collect();
        let side = |tag: Tag| -> Vec<usize> {
            (0..self.boundary_edges.len())
                .filter(|&e| self.boundary_edges[e].tag == tag)
                .collect()
        };
        let (side_a, side_b) = (side(tag_a), side(tag_b));
        if side_a.is_empty() || side_a.len() != side_b.len() {
            return Err(MeshError::Periodic(format!(
                "tags {tag_a} and {tag_b} have {} and {} edges",
                side_a.len(),
                side_b.len()
            )));
        }
        let mut used = vec![false; side_b.len()];
        let mut pairs = Vec::with_capacity(side_a.len());
        for &ea in &side_a {
            if already.contains(&ea) {
                return Err(MeshError::Periodic(format!("edge {ea} is already paired")));
            }
            let (ma, la) = self.edge_midpoint_length(ea);
            let tol = 1e-9 * la.max(offset.norm());
            let found = side_b.iter().enumerate().find(|&(slot, &eb)| {
                let (mb, lb) = self.edge_midpoint_length(eb);
                !used[slot] && (mb - ma - offset).norm() <= tol && (lb - la).abs() <= tol
            });
            match found {
                Some((slot, &eb)) => {
                    used[slot] = true;
                    pairs.push(PeriodicPair {
                        first: ea,
                        second: eb,
                        offset,
                    });
                }
                None => {
                    return Err(MeshError::Periodic(format!(
                        "no partner for edge {ea} (tag {tag_a}) at offset ({}, {})",
                        offset.x, offset.y
                    )))
                }
            }
        }
        let n = pairs.len();
        self.periodic_pairs.extend(pairs);
        Ok(n)
    }

    fn edge_midpoint_length(&self, e: usize) -> (Vec2, f64) {
        let [a, b] = self.boundary_edges[e].vertices;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        ((pa + pb) * 0.5, (pb - pa).norm())
    }

    /// Vertex identification induced by the periodic pairs: returns the
    /// pressure degree of freedom of every vertex and the number of dofs.
    pub fn vertex_dofs(&self) -> (Vec<usize>, usize) {
        let nv = self.vertices.len();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn root(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for pair in &self.periodic_pairs {
            let a = self.boundary_edges[pair.first].vertices;
            let b = self.boundary_edges[pair.second].vertices;
            for &va in &a {
                let target = self.vertices[va] + pair.offset;
                let vb = if (self.vertices[b[0]] - target).norm() < (self.vertices[b[1]] - target).norm() {
                    b[0]
                } else {
                    b[1]
                };
                let (ra, rb) = (root(&mut parent, va), root(&mut parent, vb));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut dof = vec![usize::MAX; nv];
        let mut count = 0;
        for v in 0..nv {
            let r = root(&mut parent, v);
            if dof[r] == usize::MAX {
                dof[r] = count;
                count += 1;
            }
            dof[v] = dof[r];
        }
        (dof, count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> PrimalMesh {
        let v = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        let t = vec![[0, 1, 2], [0, 2, 3]];
        let b = [[0, 1], [1, 2], [2, 3], [3, 0]]
            .iter()
            .zip([1, 2, 3, 4])
            .map(|(&vertices, tag)| BoundaryEdge { vertices, tag })
            .collect();
        PrimalMesh::new(v, t, b).unwrap()
    }

    #[test]
    fn square_is_valid() {
        let m = unit_square();
        assert_eq!(m.edge_table().unwrap().len(), 5);
        assert!((m.total_area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clockwise_triangle_rejected() {
        let mut m = unit_square();
        m.triangles[1] = [0, 3, 2];
        assert!(matches!(m.validate(), Err(MeshError::NegativeArea { triangle: 1, .. })));
    }

    #[test]
    fn missing_tag_rejected() {
        let mut m = unit_square();
        m.boundary_edges.pop();
        assert!(matches!(m.validate(), Err(MeshError::UntaggedBoundaryEdge(..))));
    }

    #[test]
    fn interior_edge_cannot_be_tagged() {
        let mut m = unit_square();
        m.boundary_edges.push(BoundaryEdge { vertices: [0, 2], tag: 9 });
        assert!(matches!(m.validate(), Err(MeshError::NotABoundaryEdge(0, 2))));
    }

    #[test]
    fn non_manifold_edge_rejected() {
        let mut m = unit_square();
        m.vertices.push(Vec2::new(0.5, -1.0));
        m.triangles.push([0, 4, 1]);
        m.triangles.push([1, 4, 2]);
        m.triangles.push([2, 4, 1]);
        assert!(matches!(m.edge_table(), Err(MeshError::NonManifoldEdge(..))));
    }

    #[test]
    fn periodic_pairing_merges_vertices() {
        let mut m = unit_square();
        assert_eq!(m.pair_periodic(4, 2, Vec2::new(1.0, 0.0)).unwrap(), 1);
        let (dof, n) = m.vertex_dofs();
        assert_eq!(n, 2);
        assert_eq!(dof[0], dof[1]);
        assert_eq!(dof[3], dof[2]);
        assert!(m.pair_periodic(1, 3, Vec2::new(0.0, 0.5)).is_err());
        m.pair_periodic(1, 3, Vec2::new(0.0, 1.0)).unwrap();
        assert_eq!(m.vertex_dofs().1, 1);
    }
}
