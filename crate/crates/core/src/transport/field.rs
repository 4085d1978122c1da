use crate::meshcore::GeometryCache;
use crate::Vec2;

/// Momentum of cell `i` in a flat `[x0, y0, x1, y1, ...]` vector.
#[inline]
pub fn cell(w: &[f64], i: usize) -> Vec2 {
    Vec2::new(w[2 * i], w[2 * i + 1])
}

#[inline]
pub fn set_cell(w: &mut [f64], i: usize, v: Vec2) {
    w[2 * i] = v.x;
    w[2 * i + 1] = v.y;
}

#[inline]
pub fn add_cell(w: &mut [f64], i: usize, v: Vec2) {
    w[2 * i] += v.x;
    w[2 * i + 1] += v.y;
}

pub fn from_cells(values: impl IntoIterator<Item = Vec2>) -> Vec<f64> {
    values.into_iter().flat_map(|v| [v.x, v.y]).collect()
}

/// Total kinetic energy `sum |C_i| |W_i|^2 / (2 rho)`.
pub fn kinetic_energy(w: &[f64], geometry: &GeometryCache, rho: f64) -> f64 {
    geometry
        .cell_volume
        .iter()
        .enumerate()
        .map(|(i, &v)| v * cell(w, i).norm_squared())
        .sum::<f64>()
        / (2.0 * rho)
}
