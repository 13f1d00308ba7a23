use super::point::Point;
use crate::par::{self, ExecMode};

/// Lattice shared by every mask of one construction: cell `(i, j)` is the
/// closed square `[ox + i h, ox + (i+1) h] x [oy + j h, oy + (j+1) h]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub origin: Point,
    pub h: f64,
}

impl Grid {
    pub fn new(origin: Point, h: f64) -> Self {
        assert!(h > 0.0 && h.is_finite(), "grid resolution must be positive");
        Grid { origin, h }
    }

    pub fn cell_center(&self, i: i64, j: i64) -> Point {
        Point::new(
            self.origin.x + (i as f64 + 0.5) * self.h,
            self.origin.y + (j as f64 + 0.5) * self.h,
        )
    }

    pub fn cell_corner(&self, i: i64, j: i64) -> Point {
        Point::new(
            self.origin.x + i as f64 * self.h,
            self.origin.y + j as f64 * self.h,
        )
    }

    /// Cell containing `p` (half-open convention for points on edges).
    pub fn cell_of(&self, p: Point) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.h).floor() as i64,
            ((p.y - self.origin.y) / self.h).floor() as i64,
        )
    }

    /// Distance from `p` to the closed cell `(i, j)`.
    pub fn point_cell_dist(&self, p: Point, i: i64, j: i64) -> f64 {
        let c = self.cell_corner(i, j);
        let dx = (c.x - p.x).max(p.x - (c.x + self.h)).max(0.0);
        let dy = (c.y - p.y).max(p.y - (c.y + self.h)).max(0.0);
        dx.hypot(dy)
    }

    /// Distance between two closed cells; zero when they touch.
    pub fn cell_cell_dist(&self, a: (i64, i64), b: (i64, i64)) -> f64 {
        let gx = ((a.0 - b.0).abs() - 1).max(0) as f64;
        let gy = ((a.1 - b.1).abs() - 1).max(0) as f64;
        gx.hypot(gy) * self.h
    }

    /// Rectangle of cells covering the axis-aligned box `[x0,x1] x [y0,y1]`.
    pub fn rect_covering(&self, x0: f64, y0: f64, x1: f64, y1: f64) -> IRect {
        let (i0, j0) = self.cell_of(Point::new(x0, y0));
        let (i1, j1) = self.cell_of(Point::new(x1, y1));
        IRect::new(i0, j0, i1 + 1, j1 + 1)
    }
}

/// Half-open integer rectangle `[i0, i1) x [j0, j1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IRect {
    pub i0: i64,
    pub j0: i64,
    pub i1: i64,
    pub j1: i64,
}

impl IRect {
    pub const EMPTY: IRect = IRect { i0: 0, j0: 0, i1: 0, j1: 0 };

    pub fn new(i0: i64, j0: i64, i1: i64, j1: i64) -> Self {
        if i1 <= i0 || j1 <= j0 {
            IRect::EMPTY
        } else {
            IRect { i0, j0, i1, j1 }
        }
    }

    pub fn width(&self) -> usize {
        (self.i1 - self.i0).max(0) as usize
    }

    pub fn height(&self) -> usize {
        (self.j1 - self.j0).max(0) as usize
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        self.area() == 0
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        i >= self.i0 && i < self.i1 && j >= self.j0 && j < self.j1
    }

    pub fn union(&self, o: &IRect) -> IRect {
        if self.is_empty() {
            return *o;
        }
        if o.is_empty() {
            return *self;
        }
        IRect::new(
            self.i0.min(o.i0),
            self.j0.min(o.j0),
            self.i1.max(o.i1),
            self.j1.max(o.j1),
        )
    }

    pub fn intersect(&self, o: &IRect) -> IRect {
        IRect::new(
            self.i0.max(o.i0),
            self.j0.max(o.j0),
            self.i1.min(o.i1),
            self.j1.min(o.j1),
        )
    }

    pub fn expand(&self, m: i64) -> IRect {
        if self.is_empty() {
            return *self;
        }
        IRect::new(self.i0 - m, self.j0 - m, self.i1 + m, self.j1 + m)
    }

    /// True when `inner` sits inside `self` with at least `margin` free cells on every side.
    pub fn contains_with_margin(&self, inner: &IRect, margin: i64) -> bool {
        inner.is_empty()
            || (inner.i0 - margin >= self.i0
                && inner.j0 - margin >= self.j0
                && inner.i1 + margin <= self.i1
                && inner.j1 + margin <= self.j1)
    }

    #[inline]
    pub fn index(&self, i: i64, j: i64) -> usize {
        (j - self.j0) as usize * self.width() + (i - self.i0) as usize
    }

    #[inline]
    pub fn cell_at(&self, idx: usize) -> (i64, i64) {
        let w = self.width();
        (self.i0 + (idx % w) as i64, self.j0 + (idx / w) as i64)
    }
}

/// A compact planar set: the closed union of finitely many grid cells.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMask {
    grid: Grid,
    bbox: IRect,
    bits: Vec<bool>,
}

impl GridMask {
    pub fn empty(grid: Grid) -> Self {
        GridMask {
            grid,
            bbox: IRect::EMPTY,
            bits: Vec::new(),
        }
    }

    /// Mask over `rect` keeping cells for which `keep(i, j)` holds; the
    /// bounding box is then tightened.
    pub fn from_fn<F>(grid: Grid, rect: IRect, mode: ExecMode, keep: F) -> Self
    where
        F: Fn(i64, i64) -> bool + Sync + Send,
    {
        let bits = par::map_range(mode, rect.area(), |idx| {
            let (i, j) = rect.cell_at(idx);
            keep(i, j)
        });
        GridMask {
            grid,
            bbox: rect,
            bits,
        }
        .tightened()
    }

    /// Cells whose centers satisfy `pred`.
    pub fn from_centers<F>(grid: Grid, rect: IRect, mode: ExecMode, pred: F) -> Self
    where
        F: Fn(Point) -> bool + Sync + Send,
    {
        Self::from_fn(grid, rect, mode, |i, j| pred(grid.cell_center(i, j)))
    }

    pub fn from_cells<I: IntoIterator<Item = (i64, i64)>>(grid: Grid, cells: I) -> Self {
        let cells: Vec<(i64, i64)> = cells.into_iter().collect();
        if cells.is_empty() {
            return Self::empty(grid);
        }
        let mut rect = IRect::new(cells[0].0, cells[0].1, cells[0].0 + 1, cells[0].1 + 1);
        for &(i, j) in &cells {
            rect = rect.union(&IRect::new(i, j, i + 1, j + 1));
        }
        let mut bits = vec![false; rect.area()];
        for &(i, j) in &cells {
            bits[rect.index(i, j)] = true;
        }
        GridMask {
            grid,
            bbox: rect,
            bits,
        }
    }

    /// Raw constructor used by deserialization; the bit vector must match `bbox`.
    pub(crate) fn from_raw(grid: Grid, bbox: IRect, bits: Vec<bool>) -> Self {
        assert_eq!(bbox.area(), bits.len());
        GridMask { grid, bbox, bits }.tightened()
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn resolution(&self) -> f64 {
        self.grid.h
    }

    pub fn bbox(&self) -> IRect {
        self.bbox
    }

    pub(crate) fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bbox.is_empty()
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    #[inline]
    pub fn contains(&self, i: i64, j: i64) -> bool {
        self.bbox.contains(i, j) && self.bits[self.bbox.index(i, j)]
    }

    /// Whether the closed set contains the point `p` (points on cell edges count).
    pub fn contains_point(&self, p: Point) -> bool {
        let (i, j) = self.grid.cell_of(p);
        let eps = 1e-12 * self.grid.h.max(1.0);
        for di in -1..=1 {
            for dj in -1..=1 {
                if self.contains(i + di, j + dj)
                    && self.grid.point_cell_dist(p, i + di, j + dj) <= eps
                {
                    return true;
                }
            }
        }
        false
    }

    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(idx, _)| self.bbox.cell_at(idx))
    }

    fn tightened(self) -> Self {
        let r = self.bbox;
        let (mut i0, mut j0, mut i1, mut j1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
        for (idx, b) in self.bits.iter().enumerate() {
            if *b {
                let (i, j) = r.cell_at(idx);
                i0 = i0.min(i);
                j0 = j0.min(j);
                i1 = i1.max(i + 1);
                j1 = j1.max(j + 1);
            }
        }
        if i0 == i64::MAX {
            return GridMask::empty(self.grid);
        }
        let nr = IRect::new(i0, j0, i1, j1);
        if nr == r {
            return self;
        }
        let mut bits = vec![false; nr.area()];
        for j in nr.j0..nr.j1 {
            for i in nr.i0..nr.i1 {
                bits[nr.index(i, j)] = self.bits[r.index(i, j)];
            }
        }
        GridMask {
            grid: self.grid,
            bbox: nr,
            bits,
        }
    }

    fn check_grid(&self, other: &GridMask) {
        assert_eq!(
            self.grid, other.grid,
            "set operations require masks on the same grid"
        );
    }

    fn combine(&self, other: &GridMask, rect: IRect, op: impl Fn(bool, bool) -> bool) -> GridMask {
        let mut bits = vec![false; rect.area()];
        for j in rect.j0..rect.j1 {
            for i in rect.i0..rect.i1 {
                bits[rect.index(i, j)] = op(self.contains(i, j), other.contains(i, j));
            }
        }
        GridMask {
            grid: self.grid,
            bbox: rect,
            bits,
        }
        .tightened()
    }

    pub fn union(&self, other: &GridMask) -> GridMask {
        self.check_grid(other);
        self.combine(other, self.bbox.union(&other.bbox), |a, b| a || b)
    }

    pub fn intersection(&self, other: &GridMask) -> GridMask {
        self.check_grid(other);
        self.combine(other, self.bbox.intersect(&other.bbox), |a, b| a && b)
    }

    pub fn difference(&self, other: &GridMask) -> GridMask {
        self.check_grid(other);
        self.combine(other, self.bbox, |a, b| a && !b)
    }

    pub fn is_subset_of(&self, other: &GridMask) -> bool {
        self.cells().all(|(i, j)| other.contains(i, j))
    }

    /// Cells of the mask having a 4-neighbour outside the mask.
    pub fn boundary_cells(&self) -> Vec<(i64, i64)> {
        self.cells()
            .filter(|&(i, j)| {
                !self.contains(i + 1, j)
                    || !self.contains(i - 1, j)
                    || !self.contains(i, j + 1)
                    || !self.contains(i, j - 1)
            })
            .collect()
    }

    /// Complement of the mask inside `rect`.
    pub fn complement_in(&self, rect: IRect) -> GridMask {
        let mut bits = vec![false; rect.area()];
        for j in rect.j0..rect.j1 {
            for i in rect.i0..rect.i1 {
                bits[rect.index(i, j)] = !self.contains(i, j);
            }
        }
        GridMask {
            grid: self.grid,
            bbox: rect,
            bits,
        }
        .tightened()
    }

    /// Morphological dilation: every cell whose center lies within `radius`
    /// of the closed set.
    pub fn dilate(&self, radius: f64) -> GridMask {
        if self.is_empty() || radius <= 0.0 {
            return self.clone();
        }
        let h = self.grid.h;
        let reach = (radius / h).ceil() as i64 + 1;
        let mut offsets = Vec::new();
        for di in -reach..=reach {
            for dj in -reach..=reach {
                let dx = ((di.abs() as f64) * h - 0.5 * h).max(0.0);
                let dy = ((dj.abs() as f64) * h - 0.5 * h).max(0.0);
                if dx.hypot(dy) <= radius {
                    offsets.push((di, dj));
                }
            }
        }
        let rect = self.bbox.expand(reach);
        let mut bits = vec![false; rect.area()];
        for (i, j) in self.cells() {
            bits[rect.index(i, j)] = true;
        }
        for (i, j) in self.boundary_cells() {
            for &(di, dj) in &offsets {
                bits[rect.index(i + di, j + dj)] = true;
            }
        }
        GridMask {
            grid: self.grid,
            bbox: rect,
            bits,
        }
        .tightened()
    }

    /// Closed-cell distance from `p` to the mask, searching cells within
    /// `limit`; `None` when nothing lies that close.
    pub fn distance_to_point(&self, p: Point, limit: f64) -> Option<f64> {
        if self.is_empty() {
            return None;
        }
        let h = self.grid.h;
        let (ci, cj) = self.grid.cell_of(p);
        let reach = (limit / h).ceil() as i64 + 1;
        let window = IRect::new(ci - reach, cj - reach, ci + reach + 1, cj + reach + 1)
            .intersect(&self.bbox);
        let mut best: Option<f64> = None;
        for j in window.j0..window.j1 {
            for i in window.i0..window.i1 {
                if self.contains(i, j) {
                    let d = self.grid.point_cell_dist(p, i, j);
                    if d <= limit && best.is_none_or(|b| d < b) {
                        best = Some(d);
                    }
                }
            }
        }
        best
    }

    /// Largest `|z|` over the closed set.
    pub fn max_norm(&self) -> f64 {
        let h = self.grid.h;
        self.boundary_cells()
            .iter()
            .flat_map(|&(i, j)| {
                let c = self.grid.cell_corner(i, j);
                [
                    c,
                    c + Point::new(h, 0.0),
                    c + Point::new(0.0, h),
                    c + Point::new(h, h),
                ]
            })
            .map(|p| p.norm())
            .fold(0.0, f64::max)
    }

    /// Re-express the mask on a grid refined by integer `factor` (same origin).
    pub fn refine(&self, factor: i64) -> GridMask {
        assert!(factor >= 1);
        let grid = Grid::new(self.grid.origin, self.grid.h / factor as f64);
        if self.is_empty() {
            return GridMask::empty(grid);
        }
        let r = self.bbox;
        let rect = IRect::new(r.i0 * factor, r.j0 * factor, r.i1 * factor, r.j1 * factor);
        let mut bits = vec![false; rect.area()];
        for (idx, b) in bits.iter_mut().enumerate() {
            let (i, j) = rect.cell_at(idx);
            *b = self.contains(i.div_euclid(factor), j.div_euclid(factor));
        }
        GridMask { grid, bbox: rect, bits }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(Point::ORIGIN, 1.0 / 32.0)
    }

    fn disk(r: f64) -> GridMask {
        let g = grid();
        GridMask::from_centers(g, g.rect_covering(-2.0, -2.0, 2.0, 2.0), ExecMode::Sequential, |p| {
            p.norm() <= r
        })
    }

    #[test]
    fn set_ops_are_consistent() {
        let a = disk(1.0);
        let b = disk(0.5);
        assert!(b.is_subset_of(&a));
        assert_eq!(a.union(&b), a);
        assert_eq!(a.intersection(&b), b);
        let ring = a.difference(&b);
        assert_eq!(ring.count() + b.count(), a.count());
        assert!(ring.intersection(&b).is_empty());
    }

    #[test]
    fn dilation_grows_by_radius() {
        let b = disk(0.5);
        let d = b.dilate(0.25);
        assert!(b.is_subset_of(&d));
        let expect = disk(0.75);
        // cells that differ lie within one cell of the radius-0.75 circle
        for (i, j) in d.cells().chain(expect.cells()) {
            if d.contains(i, j) != expect.contains(i, j) {
                let r = grid().cell_center(i, j).norm();
                assert!((r - 0.75).abs() < 2.0 * grid().h, "stray cell at r = {r}");
            }
        }
    }

    #[test]
    fn refine_preserves_area() {
        let b = disk(0.5);
        let f = b.refine(4);
        assert_eq!(f.count(), 16 * b.count());
        assert!(f.contains_point(Point::new(0.1, 0.1)));
    }

    #[test]
    fn contains_point_is_closed() {
        let g = grid();
        let m = GridMask::from_cells(g, [(0, 0)]);
        assert!(m.contains_point(Point::new(1.0 / 32.0, 0.0)));
        assert!(m.contains_point(Point::new(0.0, 0.0)));
        assert!(!m.contains_point(Point::new(-0.01, 0.0)));
    }
}
