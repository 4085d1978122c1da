use crate::meshcore::Meshes;
use crate::transport::field::cell;
use crate::{Mat2, Vec2};

/// Per-triangle CR gradients `dW_c/dx_d` (row `c`, column `d`) of a field
/// stored on dual cells.
pub fn cr_triangle_gradients(w: &[f64], meshes: &Meshes) -> Vec<Mat2> {
    meshes
        .dual
        .triangle_cells
        .iter()
        .zip(&meshes.geometry.triangles)
        .map(|(tc, tg)| {
            let mut g = Mat2::zeros();
            for l in 0..3 {
                g += cell(w, tc[l]) * tg.grad_cr[l].transpose();
            }
            g
        })
        .collect()
}

/// Cell gradients: area-weighted average over the halves of each cell.
pub fn cr_cell_gradients(w: &[f64], meshes: &Meshes) -> Vec<Mat2> {
    let tri = cr_triangle_gradients(w, meshes);
    average_onto_cells(&tri, meshes)
}

pub fn average_onto_cells<T>(per_triangle: &[T], meshes: &Meshes) -> Vec<T>
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    meshes
        .dual
        .cells
        .iter()
        .zip(&meshes.geometry.subelement_weights)
        .map(|(c, w)| {
            let mut acc = per_triangle[c.halves[0].triangle] * w[0];
            for (h, &wh) in c.halves.iter().zip(w).skip(1) {
                acc = acc + per_triangle[h.triangle] * wh;
            }
            acc
        })
        .collect()
}

/// Per-triangle P1 gradient of a vertex (pressure dof) field.
pub fn p1_triangle_gradients(p: &[f64], meshes: &Meshes) -> Vec<Vec2> {
    meshes
        .primal
        .triangles
        .iter()
        .zip(&meshes.geometry.triangles)
        .map(|(t, tg)| {
            let mut g = Vec2::zeros();
            for m in 0..3 {
                g += p[meshes.dual.vertex_dofs[t[m]]] * tg.grad_lambda[m];
            }
            g
        })
        .collect()
}

pub fn p1_cell_gradients(p: &[f64], meshes: &Meshes) -> Vec<Vec2> {
    average_onto_cells(&p1_triangle_gradients(p, meshes), meshes)
}

/// Reconstructed face states `(W_ij^-, W_ij^+)` for every interior face and
/// the reconstructed inner state of every boundary face.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceStates {
    pub interior: Vec<(Vec2, Vec2)>,
    pub boundary: Vec<Vec2>,
}

pub fn muscl_reconstruct(w: &[f64], gradients: Option<&[Mat2]>, meshes: &Meshes) -> FaceStates {
    let (dual, geom) = (&meshes.dual, &meshes.geometry);
    let interior = dual
        .faces
        .iter()
        .enumerate()
        .map(|(f, face)| {
            let [a, b] = face.cells;
            match gradients {
                Some(g) => (
                    cell(w, a) + g[a] * geom.face_offsets[f][0],
                    cell(w, b) + g[b] * geom.face_offsets[f][1],
                ),
                None => (cell(w, a), cell(w, b)),
            }
        })
        .collect();
    let boundary = dual
        .boundary_faces
        .iter()
        .enumerate()
        .map(|(k, bf)| match gradients {
            Some(g) => cell(w, bf.cell) + g[bf.cell] * geom.boundary_offset[k],
            None => cell(w, bf.cell),
        })
        .collect();
    FaceStates { interior, boundary }
}
