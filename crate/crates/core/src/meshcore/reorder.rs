use crate::error::MeshError;
use crate::meshcore::dual::DualMesh;
use crate::meshcore::geometry::GeometryCache;
use crate::Vec2;

/// Permutation of dual cells obtained by sorting their projections onto a
/// main flow direction into equidistant bins.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOrdering {
    /// `permutation[old] = new`.
    pub permutation: Vec<usize>,
    /// `order[new] = old`; the sweep order of the preconditioner.
    pub order: Vec<usize>,
    pub bin_of_cell: Vec<i64>,
    pub direction: Vec2,
    pub anchor: Vec2,
    pub bin_width: f64,
    pub n_bins: usize,
}

impl CellOrdering {
    pub fn identity(n: usize) -> Self {
        Self {
            permutation: (0..n).collect(),
            order: (0..n).collect(),
            bin_of_cell: vec![0; n],
            direction: Vec2::new(1.0, 0.0),
            anchor: Vec2::zeros(),
            bin_width: f64::INFINITY,
            n_bins: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Bins the scalar keys `xi` with width `bin_width`, concatenating bins in
/// ascending order and keeping insertion order inside each bin.
pub fn order_by_bins(xi: &[f64], bin_width: f64) -> Result<(Vec<usize>, Vec<i64>), MeshError> {
    if !(bin_width > 0.0) {
        return Err(MeshError::InvalidArgument(format!("bin width must be positive, got {bin_width}")));
    }
    let bins: Vec<i64> = xi.iter().map(|&x| (x / bin_width).floor() as i64).collect();
    let mut order: Vec<usize> = (0..xi.len()).collect();
    // stable sort keeps FIFO order within a bin
    order.sort_by_key(|&i| bins[i]);
    Ok((order, bins))
}

/// Default bin width: the domain extent along `direction` split into
/// `max(1, round(extent / mean incircle diameter))` bins.
pub fn default_bin_width(geometry: &GeometryCache, direction: Vec2) -> (f64, usize) {
    let xi: Vec<f64> = geometry.cell_centroid.iter().map(|x| x.dot(&direction)).collect();
    let (lo, hi) = xi.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let extent = (hi - lo).max(0.0);
    let n = geometry.incircle_radius.len().max(1) as f64;
    let mean_diameter = 2.0 * geometry.incircle_radius.iter().sum::<f64>() / n;
    let n_bins = if mean_diameter > 0.0 {
        ((extent / mean_diameter).round() as usize).max(1)
    } else {
        1
    };
    let width = if extent > 0.0 { extent / n_bins as f64 } else { 1.0 };
    (width, n_bins)
}

pub fn reorder_cells(
    dual: &DualMesh,
    geometry: &GeometryCache,
    direction: Vec2,
    anchor: Vec2,
    bin_width: f64,
) -> Result<CellOrdering, MeshError> {
    if ((direction.norm() - 1.0).abs()) > 1e-12 {
        return Err(MeshError::InvalidArgument(format!(
            "reordering direction must be a unit vector, has norm {}",
            direction.norm()
        )));
    }
    let xi: Vec<f64> = (0..dual.n_cells())
        .map(|i| (geometry.cell_centroid[i] - anchor).dot(&direction))
        .collect();
    let (order, bins) = order_by_bins(&xi, bin_width)?;
    let mut permutation = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        permutation[old] = new;
    }
    let n_bins = match (bins.iter().min(), bins.iter().max()) {
        (Some(lo), Some(hi)) => (hi - lo + 1) as usize,
        _ => 0,
    };
    Ok(CellOrdering {
        permutation,
        order,
        bin_of_cell: bins,
        direction,
        anchor,
        bin_width,
        n_bins,
    })
}

/// Splits each neighbor set into the cells preceding (`.0`) and following
/// (`.1`) the cell in the ordering.
pub fn split_neighbors(dual: &DualMesh, ordering: &CellOrdering) -> Vec<(Vec<usize>, Vec<usize>)> {
    (0..dual.n_cells())
        .map(|i| {
            let me = ordering.permutation[i];
            dual.neighbors(i).partition(|&j| ordering.permutation[j] < me)
        })
        .collect()
}
