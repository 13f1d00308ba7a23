use crate::geometry::{Point, Wedge};
use crate::par::{self, ExecMode};

use super::region::FineRegion;
use super::PotentialError;

/// Default length budget factor.
pub const DEFAULT_ALPHA: f64 = std::f64::consts::SQRT_2;

/// Parameters of the apex search along the perpendicular bisector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeSearch {
    pub alpha: f64,
    /// Apex heights per side of the bisector.
    pub heights: usize,
    /// Certification samples per leg.
    pub samples_per_leg: usize,
    pub mode: ExecMode,
}

impl Default for WedgeSearch {
    fn default() -> Self {
        WedgeSearch {
            alpha: DEFAULT_ALPHA,
            heights: 512,
            samples_per_leg: 4096,
            mode: ExecMode::default(),
        }
    }
}

impl WedgeSearch {
    pub fn with_alpha(alpha: f64) -> Self {
        WedgeSearch { alpha, ..Self::default() }
    }
}

/// Samples `s` apart cover a segment with balls of radius `s / 2`.
fn leg_certified<R: FineRegion + ?Sized>(u: &R, from: Point, to: Point, samples: usize) -> bool {
    let len = from.dist(to);
    if len == 0.0 {
        return u.contains(from);
    }
    let rho = 0.5 * len / samples as f64 * (1.0 + 1e-9);
    (0..=samples).all(|k| u.contains_ball(from.lerp(to, k as f64 / samples as f64), rho))
}

pub fn wedge_certified<R: FineRegion + ?Sized>(u: &R, w: &Wedge, samples_per_leg: usize) -> bool {
    leg_certified(u, w.p, w.apex, samples_per_leg) && leg_certified(u, w.apex, w.q, samples_per_leg)
}

/// A wedge from `a` to `b` inside `u` of total length below `alpha |a - b|`,
/// with the default search parameters.
pub fn find_wedge<R: FineRegion + ?Sized>(a: Point, b: Point, u: &R, alpha: f64) -> Result<Wedge, PotentialError> {
    find_wedge_with(a, b, u, &WedgeSearch::with_alpha(alpha))
}

/// Heights are tried in the order `0, +D, -D, +2D, -2D, ...` with
/// `D = y_max / heights` and `|y| < y_max = (d / 2) sqrt(alpha^2 - 1)`,
/// which keeps every candidate strictly inside the length budget.
pub fn find_wedge_with<R: FineRegion + ?Sized>(
    a: Point,
    b: Point,
    u: &R,
    search: &WedgeSearch,
) -> Result<Wedge, PotentialError> {
    if !(search.alpha > 1.0) || search.heights == 0 || search.samples_per_leg == 0 {
        return Err(PotentialError::InvalidParameter("wedge search needs alpha > 1".into()));
    }
    let d = a.dist(b);
    if d == 0.0 {
        return Err(PotentialError::SamePoint);
    }
    let y_max = 0.5 * d * (search.alpha * search.alpha - 1.0).sqrt();
    let step = y_max / search.heights as f64;
    let mut heights = vec![0.0];
    for k in 1..search.heights {
        heights.push(k as f64 * step);
        heights.push(-(k as f64) * step);
    }
    let budget = search.alpha * d;
    for chunk in heights.chunks(64) {
        let ok = par::map_slice(search.mode, chunk, |&y| {
            let w = Wedge::with_height(a, b, y);
            w.total_length() < budget && wedge_certified(u, &w, search.samples_per_leg)
        });
        if let Some(k) = ok.iter().position(|&x| x) {
            return Ok(Wedge::with_height(a, b, chunk[k]));
        }
    }
    Err(PotentialError::WedgeNotFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Segment;
    use crate::potential::{Obstacle, Plane, PuncturedRegion};
    use proptest::prelude::*;

    fn blocker() -> Segment {
        Segment::new(Point::new(0.0, -0.25), Point::new(0.0, 0.25))
    }

    #[test]
    fn plane_gives_straight_segment() {
        let (a, b) = (Point::new(-0.3, 0.7), Point::new(1.1, -0.2));
        let w = find_wedge(a, b, &Plane, DEFAULT_ALPHA).unwrap();
        assert_eq!(w.apex, a.midpoint(b));
        assert!((w.total_length() - a.dist(b)).abs() < 1e-12);
    }

    #[test]
    fn blocked_path_goes_over_the_blocker() {
        let u = PuncturedRegion::plane().without(Obstacle::Segment(blocker()));
        let (a, b) = (Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        let w = find_wedge(a, b, &u, DEFAULT_ALPHA).unwrap();
        // the first height above 1/4 on the 1/512 ladder
        assert!((w.apex.y - 129.0 / 512.0).abs() < 1e-12, "apex {:?}", w.apex);
        assert!(w.total_length() < DEFAULT_ALPHA * 2.0);
        for s in w.segments() {
            assert!(!s.intersects_segment(&blocker()));
        }
        Wedge::new(w.p, w.apex, w.q).unwrap();
    }

    #[test]
    fn coincident_endpoints_rejected() {
        let p = Point::new(0.5, 0.5);
        assert_eq!(find_wedge(p, p, &Plane, DEFAULT_ALPHA), Err(PotentialError::SamePoint));
    }

    #[test]
    fn long_blocker_exhausts_budget() {
        let wall = Segment::new(Point::new(0.0, -5.0), Point::new(0.0, 5.0));
        let u = PuncturedRegion::plane().without(Obstacle::Segment(wall));
        let r = find_wedge(Point::new(-1.0, 0.0), Point::new(1.0, 0.0), &u, DEFAULT_ALPHA);
        assert_eq!(r, Err(PotentialError::WedgeNotFound));
    }

    #[test]
    fn modes_agree() {
        let u = PuncturedRegion::plane().without(Obstacle::Segment(blocker()));
        let (a, b) = (Point::new(-1.0, 0.1), Point::new(1.0, -0.1));
        let mut s = WedgeSearch::default();
        s.mode = ExecMode::Sequential;
        let seq = find_wedge_with(a, b, &u, &s).unwrap();
        s.mode = ExecMode::Parallel;
        assert_eq!(find_wedge_with(a, b, &u, &s).unwrap(), seq);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn output_is_a_wedge_within_budget(
            ax in -1.0f64..1.0, ay in -1.0f64..1.0, bx in -1.0f64..1.0, by in -1.0f64..1.0,
            alpha in 1.05f64..3.0, cx in -0.5f64..0.5, cy in -0.5f64..0.5,
        ) {
            let (a, b) = (Point::new(ax, ay), Point::new(bx, by));
            prop_assume!(a.dist(b) > 1e-3);
            let u = PuncturedRegion::plane().without(Obstacle::Point(Point::new(cx, cy)));
            if let Ok(w) = find_wedge(a, b, &u, alpha) {
                prop_assert!(Wedge::new(w.p, w.apex, w.q).is_ok());
                prop_assert!(w.total_length() < alpha * a.dist(b));
            }
        }
    }
}
