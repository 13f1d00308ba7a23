use std::f64::consts::FRAC_1_SQRT_2;

use crate::geometry::{point_segment_dist, set_distance, Grid, GridMask, IRect, Point};
use crate::par::ExecMode;

use super::ExhaustionError;

/// Open planar primitive; the domain is a finite union of these.
#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Disk { center: Point, radius: f64 },
    Annulus { center: Point, inner: f64, outer: f64 },
    /// Simple polygon, vertices in either orientation.
    Polygon(Vec<Point>),
}

impl Primitive {
    /// Signed depth: distance to the boundary, positive inside, negative
    /// outside.
    pub fn depth(&self, z: Point) -> f64 {
        match self {
            Primitive::Disk { center, radius } => radius - z.dist(*center),
            Primitive::Annulus { center, inner, outer } => {
                let d = z.dist(*center);
                (outer - d).min(d - inner)
            }
            Primitive::Polygon(v) => {
                let n = v.len();
                let mut dist = f64::INFINITY;
                let mut inside = false;
                for k in 0..n {
                    let (a, b) = (v[k], v[(k + 1) % n]);
                    dist = dist.min(point_segment_dist(z, a, b));
                    if (a.y > z.y) != (b.y > z.y) && z.x < a.x + (z.y - a.y) / (b.y - a.y) * (b.x - a.x) {
                        inside = !inside;
                    }
                }
                if inside {
                    dist
                } else {
                    -dist
                }
            }
        }
    }

    fn validate(&self) -> Result<(), ExhaustionError> {
        let ok = match self {
            Primitive::Disk { center, radius } => center.is_finite() && *radius > 0.0,
            Primitive::Annulus { center, inner, outer } => center.is_finite() && *inner >= 0.0 && outer > inner,
            Primitive::Polygon(v) => v.len() >= 3 && v.iter().all(|p| p.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(ExhaustionError::InvalidDomain(format!("degenerate primitive {self:?}")))
        }
    }
}

/// A domain `U = (union of primitives) \ E` with finite `E`, together with
/// its own compact exhaustion: stage `n` keeps the points of depth at least
/// `insets[n]` that lie farther than `puncture_radii[n]` from `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainDescription {
    pub primitives: Vec<Primitive>,
    pub exceptional: Vec<Point>,
    /// Strictly decreasing, positive.
    pub insets: Vec<f64>,
    /// Strictly decreasing, positive; one per inset.
    pub puncture_radii: Vec<f64>,
    /// Computation window `[x0, x1] x [y0, y1]`.
    pub window: [f64; 4],
}

impl DomainDescription {
    pub fn depth(&self, z: Point) -> f64 {
        self.primitives.iter().map(|p| p.depth(z)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, z: Point) -> bool {
        self.depth(z) > 0.0 && !self.exceptional.contains(&z)
    }

    pub fn validate(&self) -> Result<(), ExhaustionError> {
        let bad = |m: &str| Err(ExhaustionError::InvalidDomain(m.into()));
        if self.primitives.is_empty() {
            return bad("at least one primitive is required");
        }
        for p in &self.primitives {
            p.validate()?;
        }
        if self.insets.is_empty() || self.insets.len() != self.puncture_radii.len() {
            return bad("insets and puncture radii must be nonempty and of equal length");
        }
        let decreasing = |v: &[f64]| v.iter().all(|x| *x > 0.0) && v.windows(2).all(|w| w[1] < w[0]);
        if !decreasing(&self.insets) || !decreasing(&self.puncture_radii) {
            return bad("insets and puncture radii must be positive and strictly decreasing");
        }
        if self.exceptional.iter().any(|e| self.depth(*e) <= 0.0) {
            return bad("exceptional points must lie inside the primitives");
        }
        let [x0, y0, x1, y1] = self.window;
        if !(x1 > x0 && y1 > y0) {
            return bad("empty window");
        }
        Ok(())
    }

    /// Rasterizes the description at resolution `h`.
    pub fn rasterize(&self, h: f64, mode: ExecMode) -> Result<FSigmaDomain, ExhaustionError> {
        self.validate()?;
        let grid = Grid::new(Point::ORIGIN, h);
        let [x0, y0, x1, y1] = self.window;
        let frame = grid.rect_covering(x0, y0, x1, y1);
        let half_diag = h * FRAC_1_SQRT_2;
        let inner: Vec<GridMask> = self
            .insets
            .iter()
            .zip(&self.puncture_radii)
            .map(|(&delta, &rho)| {
                GridMask::from_fn(grid, frame, mode, |i, j| {
                    self.depth(grid.cell_center(i, j)) - half_diag >= delta
                        && self.exceptional.iter().all(|e| grid.point_cell_dist(*e, i, j) > rho)
                })
            })
            .collect();
        let outside = GridMask::from_fn(grid, frame, mode, |i, j| self.depth(grid.cell_center(i, j)) + half_diag < 0.0);
        let interior = GridMask::from_fn(grid, frame, mode, |i, j| self.depth(grid.cell_center(i, j)) - half_diag > 0.0);
        let complement = vec![outside; inner.len()];
        FSigmaDomain::new(grid, frame, inner, complement, self.exceptional.clone(), interior)
    }
}

/// Grid form of an `F_sigma` domain: increasing compacts exhausting it,
/// increasing compacts in its complement, and finitely many exceptional
/// points.
#[derive(Debug, Clone, PartialEq)]
pub struct FSigmaDomain {
    pub grid: Grid,
    pub frame: IRect,
    pub inner_compacts: Vec<GridMask>,
    pub complement_compacts: Vec<GridMask>,
    pub exceptional_points: Vec<Point>,
    /// Cells whose closed square lies in the domain, exceptional points
    /// ignored.
    pub interior: GridMask,
}

impl FSigmaDomain {
    pub fn new(
        grid: Grid,
        frame: IRect,
        inner_compacts: Vec<GridMask>,
        complement_compacts: Vec<GridMask>,
        exceptional_points: Vec<Point>,
        interior: GridMask,
    ) -> Result<Self, ExhaustionError> {
        let bad = |m: String| Err(ExhaustionError::InvalidDomain(m));
        if inner_compacts.is_empty() || inner_compacts.len() != complement_compacts.len() {
            return bad("need one complement compact per inner compact".into());
        }
        for (n, k) in inner_compacts.iter().enumerate() {
            if k.is_empty() {
                return bad(format!("inner compact {} is empty at this resolution", n + 1));
            }
            if !frame.contains_with_margin(&k.bbox(), 2) {
                return bad(format!("inner compact {} reaches the frame", n + 1));
            }
            if !k.is_subset_of(&interior) {
                return bad(format!("inner compact {} leaves the domain", n + 1));
            }
            if let Some(prev) = n.checked_sub(1).map(|p| &inner_compacts[p]) {
                if !prev.is_subset_of(k) {
                    return bad(format!("inner compacts {} and {} are not nested", n, n + 1));
                }
            }
            let f = &complement_compacts[n];
            if !f.is_empty() && set_distance(k, f).map_err(ExhaustionError::Geometry)? <= 0.0 {
                return bad(format!("inner compact {} touches the complement compact", n + 1));
            }
            if exceptional_points.iter().any(|e| k.contains_point(*e)) {
                return bad(format!("inner compact {} contains an exceptional point", n + 1));
            }
        }
        if complement_compacts.windows(2).any(|w| !w[0].is_subset_of(&w[1])) {
            return bad("complement compacts are not nested".into());
        }
        Ok(FSigmaDomain {
            grid,
            frame,
            inner_compacts,
            complement_compacts,
            exceptional_points,
            interior,
        })
    }

    pub fn stage_count(&self) -> usize {
        self.inner_compacts.len()
    }

    /// `F_n`, 1-based.
    pub fn complement_compact(&self, n: usize) -> &GridMask {
        &self.complement_compacts[(n - 1).min(self.complement_compacts.len() - 1)]
    }

    /// Cells carved around exceptional points: closed cells within `h` of one.
    pub fn puncture_cells(&self) -> GridMask {
        let g = self.grid;
        let cells = self.exceptional_points.iter().flat_map(|e| {
            let (ci, cj) = g.cell_of(*e);
            (-2..=2)
                .flat_map(move |di| (-2..=2).map(move |dj| (ci + di, cj + dj)))
                .filter(move |&(i, j)| g.point_cell_dist(*e, i, j) <= g.h)
        });
        GridMask::from_cells(g, cells.collect::<Vec<_>>())
    }
}
