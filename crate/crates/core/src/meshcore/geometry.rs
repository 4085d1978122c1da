use crate::error::MeshError;
use crate::meshcore::dual::DualMesh;
use crate::meshcore::primal::PrimalMesh;
use crate::Vec2;

/// Outward normal of a directed edge `p -> q` of a counterclockwise polygon,
/// scaled by the edge length.
pub fn outward_normal(p: Vec2, q: Vec2) -> Vec2 {
    let d = q - p;
    Vec2::new(d.y, -d.x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleGeometry {
    pub area: f64,
    pub barycenter: Vec2,
    /// Gradients of the barycentric coordinates (P1 basis gradients).
    pub grad_lambda: [Vec2; 3],
    /// Gradients of the Crouzeix-Raviart basis functions, per local edge.
    pub grad_cr: [Vec2; 3],
    /// Midpoint of each local edge, in this triangle's coordinates.
    pub edge_midpoints: [Vec2; 3],
}

impl TriangleGeometry {
    pub fn new(p: [Vec2; 3]) -> Self {
        let area = 0.5 * (p[1] - p[0]).perp(&(p[2] - p[0]));
        let barycenter = (p[0] + p[1] + p[2]) / 3.0;
        let mut grad_lambda = [Vec2::zeros(); 3];
        for m in 0..3 {
            // gradient of the barycentric coordinate of vertex m
            let (a, b) = (p[(m + 1) % 3], p[(m + 2) % 3]);
            grad_lambda[m] = Vec2::new(a.y - b.y, b.x - a.x) / (2.0 * area);
        }
        // phi_l = 1 - 2 lambda_{opposite vertex} with edge l = (l, l+1)
        let grad_cr = [-2.0 * grad_lambda[2], -2.0 * grad_lambda[0], -2.0 * grad_lambda[1]];
        let edge_midpoints = [(p[0] + p[1]) * 0.5, (p[1] + p[2]) * 0.5, (p[2] + p[0]) * 0.5];
        Self {
            area,
            barycenter,
            grad_lambda,
            grad_cr,
            edge_midpoints,
        }
    }

    /// CR stiffness entry `|T| grad(phi_a) . grad(phi_b)`.
    pub fn cr_stiffness(&self, a: usize, b: usize) -> f64 {
        self.area * self.grad_cr[a].dot(&self.grad_cr[b])
    }

    /// P1 stiffness entry `|T| grad(lambda_a) . grad(lambda_b)`.
    pub fn p1_stiffness(&self, a: usize, b: usize) -> f64 {
        self.area * self.grad_lambda[a].dot(&self.grad_lambda[b])
    }
}

/// Geometric quantities of the primal/dual mesh pair.
///
/// Positions associated with a triangle are expressed in that triangle's own
/// coordinates, which keeps periodic cells (whose halves sit on opposite
/// sides of a seam) consistent. Cell-level positions use the frame of the
/// cell's first half.
#[derive(Debug, Clone)]
pub struct GeometryCache {
    pub triangles: Vec<TriangleGeometry>,
    pub cell_volume: Vec<f64>,
    /// Area fraction of each half of each cell; sums to one per cell.
    pub subelement_weights: Vec<Vec<f64>>,
    /// Generating edge midpoint N_i (frame of the first half).
    pub node_position: Vec<Vec2>,
    /// Area-weighted centroid of the dual polygon (frame of the first half).
    pub cell_centroid: Vec<Vec2>,
    /// Centroid minus edge midpoint; frame independent.
    pub centroid_offset: Vec<Vec2>,
    pub incircle_radius: Vec<f64>,
    pub perimeter: Vec<f64>,
    /// eta_ij = n_ij |Gamma_ij|, outward from `faces[f].cells[0]`.
    pub face_normal: Vec<Vec2>,
    pub face_length: Vec<f64>,
    pub face_midpoint: Vec<Vec2>,
    /// Reconstruction offsets from each side's node N_i to the face midpoint.
    /// Measured from the node, where the CR value lives, so that linear
    /// fields are reconstructed exactly.
    pub face_offsets: Vec<[Vec2; 2]>,
    /// Outward normal of each boundary face scaled by its length.
    pub boundary_normal: Vec<Vec2>,
    pub boundary_length: Vec<f64>,
    pub boundary_midpoint: Vec<Vec2>,
    /// Node to boundary-face midpoint; zero since the node is that midpoint.
    pub boundary_offset: Vec<Vec2>,
    /// Lumped area attached to each pressure dof.
    pub dof_area: Vec<f64>,
    /// A representative position of each pressure dof.
    pub dof_position: Vec<Vec2>,
    pub domain_area: f64,
}

impl GeometryCache {
    pub fn build(primal: &PrimalMesh, dual: &DualMesh) -> Result<Self, MeshError> {
        let triangles: Vec<TriangleGeometry> = primal
            .triangles
            .iter()
            .map(|t| TriangleGeometry::new([primal.vertices[t[0]], primal.vertices[t[1]], primal.vertices[t[2]]]))
            .collect();
        let n = dual.n_cells();
        let mut cell_volume = Vec::with_capacity(n);
        let mut subelement_weights = Vec::with_capacity(n);
        let mut node_position = Vec::with_capacity(n);
        let mut centroid_offset = Vec::with_capacity(n);
        for cell in &dual.cells {
            let mut vol = 0.0;
            let mut moment = Vec2::zeros();
            for h in &cell.halves {
                let tg = &triangles[h.triangle];
                let a = tg.area / 3.0;
                vol += a;
                // sub-triangle centroid minus edge midpoint = (B - N) / 3
                moment += a * (tg.barycenter - tg.edge_midpoints[h.local_edge]) / 3.0;
            }
            let first = cell.halves[0];
            node_position.push(triangles[first.triangle].edge_midpoints[first.local_edge]);
            centroid_offset.push(moment / vol);
            subelement_weights.push(cell.halves.iter().map(|h| triangles[h.triangle].area / 3.0 / vol).collect());
            cell_volume.push(vol);
        }
        let cell_centroid: Vec<Vec2> = node_position.iter().zip(&centroid_offset).map(|(p, o)| p + o).collect();

        let mut face_normal = Vec::with_capacity(dual.faces.len());
        let mut face_length = Vec::with_capacity(dual.faces.len());
        let mut face_midpoint = Vec::with_capacity(dual.faces.len());
        let mut face_offsets = Vec::with_capacity(dual.faces.len());
        let mut perimeter = vec![0.0; n];
        for f in &dual.faces {
            let tri = primal.triangles[f.triangle];
            let tg = &triangles[f.triangle];
            let v = primal.vertices[tri[f.vertex]];
            let eta = outward_normal(v, tg.barycenter);
            let len = eta.norm();
            if !(len > 0.0) {
                return Err(MeshError::DegenerateFace(f.triangle));
            }
            let mid = (v + tg.barycenter) * 0.5;
            let local_a = (f.vertex + 2) % 3;
            let local_b = f.vertex;
            let xa = tg.edge_midpoints[local_a];
            let xb = tg.edge_midpoints[local_b];
            face_normal.push(eta);
            face_length.push(len);
            face_midpoint.push(mid);
            face_offsets.push([mid - xa, mid - xb]);
            perimeter[f.cells[0]] += len;
            perimeter[f.cells[1]] += len;
        }

        let mut boundary_normal = Vec::with_capacity(dual.boundary_faces.len());
        let mut boundary_length = Vec::with_capacity(dual.boundary_faces.len());
        let mut boundary_midpoint = Vec::with_capacity(dual.boundary_faces.len());
        let mut boundary_offset = Vec::with_capacity(dual.boundary_faces.len());
        for bf in &dual.boundary_faces {
            let tri = primal.triangles[bf.triangle];
            let (p, q) = (primal.vertices[tri[bf.local_edge]], primal.vertices[tri[(bf.local_edge + 1) % 3]]);
            let eta = outward_normal(p, q);
            let len = eta.norm();
            if !(len > 0.0) {
                return Err(MeshError::DegenerateFace(bf.triangle));
            }
            boundary_normal.push(eta);
            boundary_length.push(len);
            boundary_midpoint.push((p + q) * 0.5);
            boundary_offset.push(Vec2::zeros());
            perimeter[bf.cell] += len;
        }
        let incircle_radius: Vec<f64> = cell_volume.iter().zip(&perimeter).map(|(a, p)| 2.0 * a / p).collect();

        let mut dof_area = vec![0.0; dual.n_pressure_dofs];
        let mut dof_position = vec![Vec2::zeros(); dual.n_pressure_dofs];
        let mut seen = vec![false; dual.n_pressure_dofs];
        for (k, tri) in primal.triangles.iter().enumerate() {
            for &v in tri {
                dof_area[dual.vertex_dofs[v]] += triangles[k].area / 3.0;
            }
        }
        for (v, &d) in dual.vertex_dofs.iter().enumerate() {
            if !seen[d] {
                seen[d] = true;
                dof_position[d] = primal.vertices[v];
            }
        }
        let domain_area = triangles.iter().map(|t| t.area).sum();

        Ok(Self {
            triangles,
            cell_volume,
            subelement_weights,
            node_position,
            cell_centroid,
            centroid_offset,
            incircle_radius,
            perimeter,
            face_normal,
            face_length,
            face_midpoint,
            face_offsets,
            boundary_normal,
            boundary_length,
            boundary_midpoint,
            boundary_offset,
            dof_area,
            dof_position,
            domain_area,
        })
    }

    /// Sum of eta over all faces of cell `i`, oriented outward from `i`.
    pub fn normal_sum(&self, dual: &DualMesh, i: usize) -> Vec2 {
        let mut s = Vec2::zeros();
        for &f in &dual.cell_faces[i] {
            let sign = if dual.faces[f].cells[0] == i { 1.0 } else { -1.0 };
            s += sign * self.face_normal[f];
        }
        for &b in &dual.cell_boundary_faces[i] {
            s += self.boundary_normal[b];
        }
        s
    }
}

/// Finds the triangle containing `x` and its barycentric coordinates.
pub fn locate_point(primal: &PrimalMesh, geometry: &GeometryCache, x: Vec2) -> Option<(usize, [f64; 3])> {
    let mut best: Option<(usize, [f64; 3], f64)> = None;
    for k in 0..primal.triangles.len() {
        let tg = &geometry.triangles[k];
        let mut lam = [0.0; 3];
        for m in 0..3 {
            lam[m] = 1.0 / 3.0 + tg.grad_lambda[m].dot(&(x - tg.barycenter));
        }
        let worst = lam.iter().cloned().fold(f64::INFINITY, f64::min);
        if worst >= -1e-12 {
            return Some((k, lam));
        }
        // keep the least-outside triangle for points on seams within roundoff
        if best.map_or(true, |b| worst > b.2) {
            best = Some((k, lam, worst));
        }
    }
    best.filter(|b| b.2 > -1e-9).map(|b| (b.0, b.1))
}
