use std::collections::{BTreeMap, BTreeSet};

use crate::geometry::{label_free_cells, ComponentLabeling, Grid, GridMask, IRect, Piece, Point, BLOCKED};
use crate::par::{self, ExecMode};

/// Cells met by samples of the pieces spaced `h / 4` apart: an 8-connected
/// chain along every piece, which no 4-connected path crosses.
pub fn rasterize_pieces(pieces: &[Piece], grid: Grid) -> GridMask {
    let step = 0.25 * grid.h;
    let cells: Vec<(i64, i64)> = pieces.iter().flat_map(|p| p.sample(step)).map(|z| grid.cell_of(z)).collect();
    GridMask::from_cells(grid, cells)
}

/// A point of the complement of the domain found in a bounded hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoleWitness {
    pub at: Point,
    /// `true` for an exceptional point, `false` for a complement-compact cell.
    pub exceptional: bool,
}

/// 4-connected components of `C \ (K_n ∪ L_n)` on a grid refined by `factor`.
#[derive(Debug, Clone)]
pub struct RefinedComplement {
    pub factor: i64,
    pub grid: Grid,
    pub rect: IRect,
    labels: Vec<u32>,
    touches: Vec<bool>,
}

impl RefinedComplement {
    /// `rect` is in coarse cells and must contain `K_n` and the pieces with
    /// a free margin.
    pub fn new(k_n: &GridMask, pieces: &[Piece], rect: IRect, factor: i64, mode: ExecMode) -> Self {
        let coarse = k_n.grid();
        let grid = Grid::new(coarse.origin, coarse.h / factor as f64);
        let fine = IRect::new(rect.i0 * factor, rect.j0 * factor, rect.i1 * factor, rect.j1 * factor);
        let curves = rasterize_pieces(pieces, grid);
        let blocked = par::map_range(mode, fine.area(), |idx| {
            let (i, j) = fine.cell_at(idx);
            curves.contains(i, j) || k_n.contains(i.div_euclid(factor), j.div_euclid(factor))
        });
        let (labels, touches) = label_free_cells(fine.width(), fine.height(), &blocked);
        RefinedComplement {
            factor,
            grid,
            rect: fine,
            labels,
            touches,
        }
    }

    /// Label of the fine cell containing `z`; `None` when blocked, the
    /// border component's label outside the raster.
    pub fn label_at(&self, z: Point) -> Option<u32> {
        let (i, j) = self.grid.cell_of(z);
        if !self.rect.contains(i, j) {
            return self.touches.iter().position(|t| *t).map(|k| k as u32);
        }
        match self.labels[self.rect.index(i, j)] {
            BLOCKED => None,
            l => Some(l),
        }
    }

    pub fn component_count(&self) -> usize {
        self.touches.len()
    }

    pub fn is_bounded(&self, label: u32) -> bool {
        !self.touches[label as usize]
    }

    /// Coarse components of `C \ K_n` whose free fine cells fall into more
    /// than one fine component. Empty exactly when property (d) holds.
    pub fn split_components(&self, coarse: &ComponentLabeling) -> Vec<u32> {
        let f = self.factor;
        let mut seen: BTreeMap<u32, u32> = BTreeMap::new();
        let mut split = BTreeSet::new();
        let border = self.touches.iter().position(|t| *t).map(|k| k as u32);
        for (idx, &l) in self.labels.iter().enumerate() {
            if l == BLOCKED {
                continue;
            }
            let (i, j) = self.rect.cell_at(idx);
            let Some(c) = coarse.label(i.div_euclid(f), j.div_euclid(f)) else { continue };
            // every border component is the same unbounded one
            let l = if self.touches[l as usize] { border.unwrap() } else { l };
            match seen.get(&c) {
                None => {
                    seen.insert(c, l);
                }
                Some(&prev) if prev != l => {
                    split.insert(c);
                }
                _ => {}
            }
        }
        split.into_iter().collect()
    }

    /// One witness per bounded fine component, or the labels lacking one.
    pub fn hole_witnesses(&self, f: &GridMask, exceptional: &[Point]) -> (BTreeMap<u32, HoleWitness>, Vec<u32>) {
        let mut found: BTreeMap<u32, HoleWitness> = BTreeMap::new();
        for (i, j) in f.cells() {
            let z = f.grid().cell_center(i, j);
            if let Some(l) = self.label_at(z) {
                if self.is_bounded(l) {
                    found.entry(l).or_insert(HoleWitness { at: z, exceptional: false });
                }
            }
        }
        for e in exceptional {
            if let Some(l) = self.label_at(*e) {
                if self.is_bounded(l) {
                    found.entry(l).or_insert(HoleWitness { at: *e, exceptional: true });
                }
            }
        }
        let missing = (0..self.touches.len() as u32)
            .filter(|l| self.is_bounded(*l) && !found.contains_key(l))
            .collect();
        (found, missing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::arc_cut;
    use crate::geometry::{complement_components, CircularArc};
    use crate::potential::Plane;

    #[test]
    fn circle_chain_separates_and_cut_reconnects() {
        let g = Grid::new(Point::ORIGIN, 1.0 / 64.0);
        let k = GridMask::from_cells(g, [(0, 0)]);
        let circle = CircularArc::full_circle(Point::ORIGIN, 0.5);
        let rect = g.rect_covering(-1.0, -1.0, 1.0, 1.0);
        let before = RefinedComplement::new(&k, &[Piece::Arc(circle)], rect, 4, ExecMode::Parallel);
        // outside, the annulus between k and the circle
        assert_eq!(before.component_count(), 2);
        let cut = arc_cut(&circle, circle.point_at_angle(0.3), 0.1, &Plane).unwrap();
        let after = RefinedComplement::new(&k, &cut.pieces, rect, 4, ExecMode::Parallel);
        assert_eq!(after.component_count(), 1);
        let labels = complement_components(&k, rect).unwrap();
        assert!(after.split_components(&labels).is_empty());
        assert_eq!(before.split_components(&labels), vec![labels.unbounded_id]);
    }

    #[test]
    fn disk_split_by_arc_is_rejoined_by_cut() {
        // D = B(a, 0.3) cut by a crossing arc: two sides before, one after
        let g = Grid::new(Point::ORIGIN, 1.0 / 64.0);
        let arc = CircularArc::new(Point::new(0.0, -1.0), 1.0, 1.2, 1.94).unwrap();
        let a = arc.midpoint();
        let outside_d = GridMask::from_centers(g, g.rect_covering(-0.7, -0.5, 0.7, 1.5), ExecMode::Parallel, |p| {
            p.dist(a) >= 0.3
        });
        let rect = g.rect_covering(-1.0, -0.8, 1.0, 1.8);
        let before = RefinedComplement::new(&outside_d, &[Piece::Arc(arc)], rect, 4, ExecMode::Parallel);
        let inside_labels: BTreeSet<u32> = [0.1, -0.1]
            .iter()
            .filter_map(|dy| before.label_at(a + Point::new(0.0, *dy)))
            .collect();
        assert_eq!(inside_labels.len(), 2);
        let cut = arc_cut(&arc, a, 0.1, &Plane).unwrap();
        let after = RefinedComplement::new(&outside_d, &cut.pieces, rect, 4, ExecMode::Parallel);
        let inside_labels: BTreeSet<u32> = [0.15, -0.15]
            .iter()
            .filter_map(|dy| after.label_at(a + Point::new(0.0, *dy)))
            .collect();
        assert_eq!(inside_labels.len(), 1);
    }

    #[test]
    fn witnesses_found_in_holes() {
        let g = Grid::new(Point::ORIGIN, 1.0 / 32.0);
        let ring = GridMask::from_centers(g, g.rect_covering(-1.0, -1.0, 1.0, 1.0), ExecMode::Parallel, |p| {
            p.norm() >= 0.4 && p.norm() <= 0.6
        });
        let rect = g.rect_covering(-1.0, -1.0, 1.0, 1.0);
        let rc = RefinedComplement::new(&ring, &[], rect, 2, ExecMode::Sequential);
        let (found, missing) = rc.hole_witnesses(&GridMask::empty(g), &[Point::new(0.05, 0.0)]);
        assert_eq!(found.len(), 1);
        assert!(missing.is_empty());
        let (_, missing) = rc.hole_witnesses(&GridMask::empty(g), &[]);
        assert_eq!(missing.len(), 1);
    }
}
