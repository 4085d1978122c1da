use crate::error::MeshError;
use crate::meshcore::primal::{BoundaryEdge, PrimalMesh, Tag};
use crate::Vec2;

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rectangle {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// Tags of the four sides of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideTags {
    pub bottom: Tag,
    pub right: Tag,
    pub top: Tag,
    pub left: Tag,
}

impl Default for SideTags {
    fn default() -> Self {
        Self {
            bottom: 1,
            right: 2,
            top: 3,
            left: 4,
        }
    }
}

/// Split pattern of the grid rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Diagonals {
    /// Lower-left to upper-right everywhere.
    #[default]
    Forward,
    /// Mirrored per quadrant. All four corner vertices lie on a diagonal, so
    /// no triangle has two boundary edges.
    UnionJack,
}

/// Uniform `nx x ny` grid of rectangles, each split along its lower-left to
/// upper-right diagonal. Vertex `(i, j)` has index `j * (nx + 1) + i`.
pub fn generate_structured_triangulation(
    nx: usize,
    ny: usize,
    domain: Rectangle,
    tags: SideTags,
) -> Result<PrimalMesh, MeshError> {
    generate_structured_triangulation_with(nx, ny, domain, tags, Diagonals::Forward)
}

/// Same grid as [`generate_structured_triangulation`] with a chosen split.
pub fn generate_structured_triangulation_with(
    nx: usize,
    ny: usize,
    domain: Rectangle,
    tags: SideTags,
    diagonals: Diagonals,
) -> Result<PrimalMesh, MeshError> {
    if nx == 0 || ny == 0 {
        return Err(MeshError::InvalidArgument(format!("cell counts must be positive, got {nx}x{ny}")));
    }
    if !(domain.width() > 0.0 && domain.height() > 0.0) {
        return Err(MeshError::InvalidArgument("degenerate rectangle".into()));
    }
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let y = if j == ny {
            domain.y1
        } else {
            domain.y0 + domain.height() * j as f64 / ny as f64
        };
        for i in 0..=nx {
            let x = if i == nx {
                domain.x1
            } else {
                domain.x0 + domain.width() * i as f64 / nx as f64
            };
            vertices.push(Vec2::new(x, y));
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            let forward = match diagonals {
                Diagonals::Forward => true,
                Diagonals::UnionJack => (2 * i < nx) == (2 * j < ny),
            };
            if forward {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        boundary_edges.push(BoundaryEdge {
            vertices: [idx(i, 0), idx(i + 1, 0)],
            tag: tags.bottom,
        });
    }
    for j in 0..ny {
        boundary_edges.push(BoundaryEdge {
            vertices: [idx(nx, j), idx(nx, j + 1)],
            tag: tags.right,
        });
    }
    for i in (0..nx).rev() {
        boundary_edges.push(BoundaryEdge {
            vertices: [idx(i + 1, ny), idx(i, ny)],
            tag: tags.top,
        });
    }
    for j in (0..ny).rev() {
        boundary_edges.push(BoundaryEdge {
            vertices: [idx(0, j + 1), idx(0, j)],
            tag: tags.left,
        });
    }
    PrimalMesh::new(vertices, triangles, boundary_edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square(n: usize, side: f64) -> PrimalMesh {
        generate_structured_triangulation(n, n, Rectangle::new(0.0, side, 0.0, side), SideTags::default()).unwrap()
    }

    #[test]
    fn convergence_mesh_sizes() {
        let m = square(16, 2.0 * PI);
        assert_eq!((m.triangles.len(), m.vertices.len()), (512, 289));
        let m = square(32, 2.0 * PI);
        assert_eq!((m.triangles.len(), m.vertices.len()), (2048, 1089));
    }

    #[test]
    fn smallest_grid() {
        let m = square(1, 1.0);
        assert_eq!(m.triangles.len(), 2);
        assert_eq!(m.vertices.len(), 4);
        assert_eq!(m.edge_table().unwrap().len(), 5);
    }

    #[test]
    fn rejects_zero_counts() {
        let r = Rectangle::new(0.0, 1.0, 0.0, 1.0);
        assert!(generate_structured_triangulation(0, 3, r, SideTags::default()).is_err());
        assert!(generate_structured_triangulation(3, 0, r, SideTags::default()).is_err());
        let flat = Rectangle::new(0.0, 1.0, 1.0, 1.0);
        assert!(generate_structured_triangulation(2, 2, flat, SideTags::default()).is_err());
    }

    #[test]
    fn deterministic_and_exact_area() {
        let a = generate_structured_triangulation(5, 3, Rectangle::new(-1.0, 2.0, 0.5, 1.5), SideTags::default()).unwrap();
        let b = generate_structured_triangulation(5, 3, Rectangle::new(-1.0, 2.0, 0.5, 1.5), SideTags::default()).unwrap();
        assert_eq!(a, b);
        assert!((a.total_area() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn union_jack_corners_have_one_boundary_edge() {
        let r = Rectangle::new(0.0, 1.0, 0.0, 1.0);
        for n in [2, 4, 7] {
            let m = generate_structured_triangulation_with(n, n, r, SideTags::default(), Diagonals::UnionJack).unwrap();
            assert!((m.total_area() - 1.0).abs() < 1e-13);
            let on_side = |a: Vec2, b: Vec2| {
                (a.x == b.x && (a.x == 0.0 || a.x == 1.0)) || (a.y == b.y && (a.y == 0.0 || a.y == 1.0))
            };
            for t in &m.triangles {
                let v = t.map(|k| m.vertices[k]);
                let walls = (0..3).filter(|&l| on_side(v[l], v[(l + 1) % 3])).count();
                assert!(walls <= 1, "n = {n}, triangle {t:?}");
            }
        }
        let f = square(4, 1.0);
        let corner = f.triangles.iter().filter(|t| t.contains(&(4 * 5))).count();
        assert_eq!(corner, 1);
    }
}
