//! Primal triangulation, face-type dual mesh, geometry and cell reordering.

pub mod dual;
pub mod geometry;
pub mod primal;
pub mod reorder;
pub mod structured;

pub use dual::{BoundaryFace, DualCell, DualMesh, Half, InteriorFace};
pub use geometry::{locate_point, GeometryCache, TriangleGeometry};
pub use primal::{BoundaryEdge, EdgeTable, PeriodicPair, PrimalMesh, Tag};
pub use reorder::{default_bin_width, order_by_bins, reorder_cells, split_neighbors, CellOrdering};
pub use structured::{generate_structured_triangulation, generate_structured_triangulation_with, Diagonals, Rectangle, SideTags};

/// Primal mesh, dual mesh and geometry bundled together.
#[derive(Debug, Clone)]
pub struct Meshes {
    pub primal: PrimalMesh,
    pub dual: DualMesh,
    pub geometry: GeometryCache,
}

impl Meshes {
    pub fn build(primal: PrimalMesh) -> Result<Self, crate::MeshError> {
        let dual = DualMesh::build(&primal)?;
        let geometry = GeometryCache::build(&primal, &dual)?;
        Ok(Self { primal, dual, geometry })
    }

    pub fn n_cells(&self) -> usize {
        self.dual.n_cells()
    }
}
