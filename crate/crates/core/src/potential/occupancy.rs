use crate::geometry::{GridMask, Point};

/// Radii `s in (0, r)` at which the circle `C(a, s)` meets a set, as a
/// union of closed intervals, together with `integral ds / s` over it.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialOccupancy {
    pub intervals: Vec<(f64, f64)>,
    /// `+inf` when the occupied radii reach down to zero.
    pub integral: f64,
}

impl RadialOccupancy {
    pub fn is_divergent(&self) -> bool {
        self.integral.is_infinite()
    }

    /// Whether the radius `t` is occupied, up to `tol`.
    pub fn occupies(&self, t: f64, tol: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| t >= lo - tol && t <= hi + tol)
    }
}

/// Radial occupancy of the closed set `f` about `a`, truncated to `(0, r)`.
///
/// Every closed cell contributes the exact interval between its nearest and
/// farthest point from `a`. A cell containing `a` occupies arbitrarily small
/// radii, which makes `ds / s` non-integrable: the result is then `+inf`.
pub fn radial_occupancy_integral(f: &GridMask, a: Point, r: f64) -> RadialOccupancy {
    assert!(r > 0.0, "radius must be positive");
    let g = f.grid();
    let mut raw: Vec<(f64, f64)> = f
        .cells()
        .filter_map(|(i, j)| {
            let lo = g.point_cell_dist(a, i, j);
            if lo >= r {
                return None;
            }
            let c = g.cell_corner(i, j);
            let hi = [0.0, g.h]
                .iter()
                .flat_map(|dx| [0.0, g.h].map(|dy| (c + Point::new(*dx, dy)).dist(a)))
                .fold(0.0, f64::max)
                .min(r);
            Some((lo, hi))
        })
        .collect();
    raw.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in raw {
        match intervals.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => intervals.push((lo, hi)),
        }
    }
    let integral = if intervals.first().is_some_and(|iv| iv.0 <= 0.0) {
        f64::INFINITY
    } else {
        intervals.iter().map(|&(lo, hi)| (hi / lo).ln()).sum()
    };
    RadialOccupancy { intervals, integral }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;
    use crate::par::ExecMode;
    use std::f64::consts::SQRT_2;

    fn grid() -> Grid {
        Grid::new(Point::ORIGIN, 1.0 / 256.0)
    }

    #[test]
    fn annulus_gives_log_two() {
        let g = grid();
        let half_diag = 0.5 * g.h * SQRT_2;
        // cells lying inside the closed annulus
        let f = GridMask::from_centers(g, g.rect_covering(-1.0, -1.0, 1.0, 1.0), ExecMode::Parallel, |p| {
            let r = p.norm();
            r - half_diag >= 0.25 && r + half_diag <= 0.5
        });
        let occ = radial_occupancy_integral(&f, Point::ORIGIN, 1.0);
        assert!((occ.integral - 2f64.ln()).abs() <= 2.0 * g.h, "{}", occ.integral);
    }

    #[test]
    fn thin_circle_has_small_occupancy() {
        // the grid image of |z| = 1/3 is a one-cell band; its occupancy
        // shrinks with the resolution
        for h in [1.0 / 256.0, 1.0 / 1024.0] {
            let g = Grid::new(Point::ORIGIN, h);
            let f = GridMask::from_centers(g, g.rect_covering(-1.0, -1.0, 1.0, 1.0), ExecMode::Parallel, |p| {
                (p.norm() - 1.0 / 3.0).abs() <= 0.5 * h
            });
            let occ = radial_occupancy_integral(&f, Point::ORIGIN, 1.0);
            assert!(occ.integral < 8.0 * h, "h = {h}: {}", occ.integral);
        }
    }

    #[test]
    fn segment_at_center_diverges() {
        let g = grid();
        let f = GridMask::from_fn(g, g.rect_covering(0.0, 0.0, 0.5, 0.0), ExecMode::Sequential, |_, j| j == 0);
        let occ = radial_occupancy_integral(&f, Point::ORIGIN, 0.5);
        assert!(occ.is_divergent());
    }

    #[test]
    fn monotone_under_inclusion() {
        let g = grid();
        let small = GridMask::from_centers(g, g.rect_covering(0.1, 0.1, 0.3, 0.2), ExecMode::Sequential, |_| true);
        let big = small.union(&GridMask::from_centers(g, g.rect_covering(-0.4, 0.05, -0.2, 0.3), ExecMode::Sequential, |_| true));
        let a = radial_occupancy_integral(&small, Point::ORIGIN, 1.0).integral;
        let b = radial_occupancy_integral(&big, Point::ORIGIN, 1.0).integral;
        assert!(a <= b);
    }
}
