use std::collections::BTreeSet;

use super::mask::{GridMask, IRect};
use super::point::Point;
use super::GeometryError;

/// Label value of blocked cells.
pub const BLOCKED: u32 = u32::MAX;

/// 4-connected labeling of the free cells of a `width x height` raster.
/// Labels are assigned in row-major scan order, so the result is
/// deterministic. Returns the labels and, per label, whether the component
/// touches the raster border.
pub fn label_free_cells(width: usize, height: usize, blocked: &[bool]) -> (Vec<u32>, Vec<bool>) {
    assert_eq!(blocked.len(), width * height);
    let mut labels: Vec<u32> = blocked
        .iter()
        .map(|&b| if b { BLOCKED } else { u32::MAX - 1 })
        .collect();
    let unvisited = u32::MAX - 1;
    let mut touches = Vec::new();
    let mut stack = Vec::new();
    for start in 0..labels.len() {
        if labels[start] != unvisited {
            continue;
        }
        let id = touches.len() as u32;
        let mut border = false;
        labels[start] = id;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let x = idx % width;
            let y = idx / width;
            if x == 0 || y == 0 || x + 1 == width || y + 1 == height {
                border = true;
            }
            let mut visit = |n: usize| {
                if labels[n] == unvisited {
                    labels[n] = id;
                    stack.push(n);
                }
            };
            if x > 0 {
                visit(idx - 1);
            }
            if x + 1 < width {
                visit(idx + 1);
            }
            if y > 0 {
                visit(idx - width);
            }
            if y + 1 < height {
                visit(idx + width);
            }
        }
        touches.push(border);
    }
    (labels, touches)
}

/// Components of `frame \ K` (4-connected).
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentLabeling {
    pub frame: IRect,
    /// One label per frame cell, [`BLOCKED`] on cells of K.
    pub labels: Vec<u32>,
    pub cell_counts: Vec<usize>,
    pub bounded_ids: BTreeSet<u32>,
    pub unbounded_id: u32,
    pub representative: Vec<Point>,
}

impl ComponentLabeling {
    pub fn component_count(&self) -> usize {
        self.cell_counts.len()
    }

    pub fn label(&self, i: i64, j: i64) -> Option<u32> {
        if !self.frame.contains(i, j) {
            return Some(self.unbounded_id);
        }
        match self.labels[self.frame.index(i, j)] {
            BLOCKED => None,
            l => Some(l),
        }
    }

    /// Cells of one component as a mask.
    pub fn component_mask(&self, k: &GridMask, id: u32) -> GridMask {
        let frame = self.frame;
        GridMask::from_cells(
            k.grid(),
            self.labels
                .iter()
                .enumerate()
                .filter(|(_, l)| **l == id)
                .map(|(idx, _)| frame.cell_at(idx)),
        )
    }
}

/// Labels the complement of `k` within `frame`. The frame must leave a free
/// margin of at least two cells around `k`.
pub fn complement_components(k: &GridMask, frame: IRect) -> Result<ComponentLabeling, GeometryError> {
    if !frame.contains_with_margin(&k.bbox(), 2) {
        return Err(GeometryError::FrameTooTight);
    }
    let blocked: Vec<bool> = (0..frame.area())
        .map(|idx| {
            let (i, j) = frame.cell_at(idx);
            k.contains(i, j)
        })
        .collect();
    let (labels, touches) = label_free_cells(frame.width(), frame.height(), &blocked);
    let n = touches.len();
    let mut cell_counts = vec![0usize; n];
    let mut representative = vec![None; n];
    for (idx, &l) in labels.iter().enumerate() {
        if l != BLOCKED {
            cell_counts[l as usize] += 1;
            if representative[l as usize].is_none() {
                let (i, j) = frame.cell_at(idx);
                representative[l as usize] = Some(k.grid().cell_center(i, j));
            }
        }
    }
    let unbounded_id = touches.iter().position(|t| *t).expect("frame border is free") as u32;
    let bounded_ids = (0..n as u32).filter(|&id| !touches[id as usize]).collect();
    Ok(ComponentLabeling {
        frame,
        labels,
        cell_counts,
        bounded_ids,
        unbounded_id,
        representative: representative.into_iter().map(|p| p.unwrap()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mask::Grid;
    use crate::par::ExecMode;

    fn mask(pred: impl Fn(Point) -> bool + Sync + Send) -> (GridMask, IRect) {
        let g = Grid::new(Point::ORIGIN, 1.0 / 32.0);
        let frame = g.rect_covering(-3.0, -3.0, 3.0, 3.0);
        (GridMask::from_centers(g, frame.expand(-4), ExecMode::Sequential, pred), frame)
    }

    #[test]
    fn annulus_has_one_hole() {
        let (k, frame) = mask(|p| (1.0..=2.0).contains(&p.norm()));
        let c = complement_components(&k, frame).unwrap();
        assert_eq!(c.bounded_ids.len(), 1);
        assert_eq!(c.component_count(), 2);
        let total: usize = c.cell_counts.iter().sum();
        assert_eq!(total + k.count(), frame.area());
    }

    #[test]
    fn disk_has_no_hole() {
        let (k, frame) = mask(|p| p.norm() <= 1.0);
        let c = complement_components(&k, frame).unwrap();
        assert!(c.bounded_ids.is_empty());
    }

    #[test]
    fn nested_annuli_have_two_holes() {
        let (k, frame) = mask(|p| {
            let r = p.norm();
            (0.5..=0.8).contains(&r) || (1.5..=2.0).contains(&r)
        });
        let c = complement_components(&k, frame).unwrap();
        assert_eq!(c.bounded_ids.len(), 2);
    }

    #[test]
    fn tight_frame_is_rejected() {
        let g = Grid::new(Point::ORIGIN, 1.0);
        let k = GridMask::from_cells(g, [(0, 0), (1, 1)]);
        let err = complement_components(&k, IRect::new(-1, -1, 3, 3)).unwrap_err();
        assert_eq!(err, GeometryError::FrameTooTight);
    }
}
