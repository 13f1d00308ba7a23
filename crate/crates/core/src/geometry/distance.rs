use super::mask::GridMask;
use super::GeometryError;
use crate::par::{self, ExecMode};

/// Distance between the closed sets of two masks on the same grid.
///
/// Zero exactly when the masks intersect (touching closed cells included).
/// Otherwise the nearest pair of cells is found among boundary cells.
pub fn set_distance(a: &GridMask, b: &GridMask) -> Result<f64, GeometryError> {
    set_distance_with(a, b, ExecMode::default())
}

pub fn set_distance_with(a: &GridMask, b: &GridMask, mode: ExecMode) -> Result<f64, GeometryError> {
    if a.is_empty() || b.is_empty() {
        return Err(GeometryError::EmptyMask);
    }
    assert_eq!(a.grid(), b.grid(), "set_distance requires a shared grid");
    let (small, large) = if a.count() <= b.count() { (a, b) } else { (b, a) };
    let small_cells: Vec<(i64, i64)> = small.cells().collect();
    let touching = par::map_slice(mode, &small_cells, |&(i, j)| {
        (-1..=1).any(|di| (-1..=1).any(|dj| large.contains(i + di, j + dj)))
    });
    if touching.into_iter().any(|t| t) {
        return Ok(0.0);
    }
    let grid = a.grid();
    let ba = a.boundary_cells();
    let bb = b.boundary_cells();
    Ok(par::min_slice(mode, &ba, |&ca| {
        bb.iter()
            .map(|&cb| grid.cell_cell_dist(ca, cb))
            .fold(f64::INFINITY, f64::min)
    }))
}
