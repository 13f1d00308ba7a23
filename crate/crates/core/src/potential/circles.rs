use std::f64::consts::PI;

use crate::geometry::{GridMask, Point};

use super::occupancy::radial_occupancy_integral;
use super::region::FineRegion;
use super::PotentialError;

/// Angular samples used to certify one circle.
pub const CIRCLE_SAMPLES: usize = 4096;

/// Candidate radii tried after the interval midpoint.
const CANDIDATES: usize = 256;

/// `C_0 = max(e^Gamma, 1/r)`, with `Gamma` the radial occupancy integral of
/// the excluded set about `a` plus ten percent. Infinite when the excluded
/// set is not thin at `a`.
pub fn good_circle_threshold(excluded: &GridMask, a: Point, r: f64) -> f64 {
    let gamma = 1.1 * radial_occupancy_integral(excluded, a, r).integral;
    gamma.exp().max(1.0 / r)
}

/// Whether the full circle `C(a, t)` lies in `v`. Consecutive samples are
/// `2 pi t / N` apart, so balls of radius `2 t sin(pi / 2N)` around them
/// cover the circle.
fn circle_certified<R: FineRegion + ?Sized>(v: &R, a: Point, t: f64) -> bool {
    let n = CIRCLE_SAMPLES;
    let rho = 2.0 * t * (PI / (2 * n) as f64).sin() * (1.0 + 1e-9);
    (0..n).all(|k| v.contains_ball(a + Point::polar(t, 2.0 * PI * k as f64 / n as f64), rho))
}

/// A radius `t in [C^{-n-1}, C^{-n}]` whose circle about `a` lies in `v`.
///
/// The midpoint is tried first, then a uniform ladder of candidates ordered
/// by distance from it. With `threshold = Some(c0)` the call refuses
/// `c <= c0`.
pub fn find_good_circle<R: FineRegion + ?Sized>(
    v: &R,
    a: Point,
    c: f64,
    n: u32,
    threshold: Option<f64>,
) -> Result<f64, PotentialError> {
    if !(c > 1.0) {
        return Err(PotentialError::InvalidParameter("C must exceed 1".into()));
    }
    if let Some(c0) = threshold {
        if !(c > c0) {
            return Err(PotentialError::NoCircleFound(format!("C = {c} does not exceed C0 = {c0}")));
        }
    }
    let hi = c.powi(-(n as i32));
    let lo = hi / c;
    let mid = 0.5 * (lo + hi);
    let mut ladder: Vec<f64> = (0..=CANDIDATES)
        .filter(|&k| 2 * k != CANDIDATES)
        .map(|k| lo + (hi - lo) * k as f64 / CANDIDATES as f64)
        .collect();
    ladder.sort_by(|x, y| (x - mid).abs().total_cmp(&(y - mid).abs()).then(x.total_cmp(y)));
    std::iter::once(mid)
        .chain(ladder)
        .find(|&t| circle_certified(v, a, t))
        .ok_or_else(|| PotentialError::NoCircleFound("every candidate radius meets the complement".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Grid, Segment};
    use crate::par::ExecMode;
    use crate::potential::{FinelyOpenPatch, Obstacle, PuncturedRegion, SubharmonicGenerator};
    use proptest::prelude::*;

    fn seg(a: f64, b: f64) -> Obstacle {
        Obstacle::Segment(Segment::new(Point::new(a, 0.0), Point::new(b, 0.0)))
    }

    #[test]
    fn unobstructed_disk_returns_midpoint() {
        let v = FinelyOpenPatch::new(Point::ORIGIN, 1.0, SubharmonicGenerator::constant(0.5)).unwrap();
        // [1/16, 1/4] has midpoint 5/32
        assert_eq!(find_good_circle(&v, Point::ORIGIN, 4.0, 1, None).unwrap(), 5.0 / 32.0);
    }

    #[test]
    fn segment_outside_interval_keeps_midpoint() {
        let v = PuncturedRegion::disk(Point::ORIGIN, 1.0).without(seg(0.125, 0.25));
        assert_eq!(find_good_circle(&v, Point::ORIGIN, 8.0, 1, None).unwrap(), 9.0 / 128.0);
    }

    #[test]
    fn segment_across_midpoint_is_avoided() {
        // occupied radii [0.06, 0.09] cover the midpoint 9/128
        let v = PuncturedRegion::disk(Point::ORIGIN, 1.0).without(seg(0.06, 0.09));
        let t = find_good_circle(&v, Point::ORIGIN, 8.0, 1, None).unwrap();
        assert!((1.0 / 64.0..=0.125).contains(&t));
        assert!(!(0.06..=0.09).contains(&t));
    }

    #[test]
    fn fully_occupied_interval_fails() {
        let v = PuncturedRegion::disk(Point::ORIGIN, 1.0).without(seg(1.0 / 64.0, 0.125));
        assert!(matches!(
            find_good_circle(&v, Point::ORIGIN, 8.0, 1, None),
            Err(PotentialError::NoCircleFound(_))
        ));
    }

    #[test]
    fn threshold_is_enforced() {
        let g = Grid::new(Point::ORIGIN, 1.0 / 256.0);
        let f = GridMask::from_centers(g, g.rect_covering(-1.0, -1.0, 1.0, 1.0), ExecMode::Sequential, |p| {
            p.norm() >= 0.25 && p.norm() <= 0.5
        });
        let c0 = good_circle_threshold(&f, Point::ORIGIN, 1.0);
        assert!(c0 > 2.0);
        let v = PuncturedRegion::disk(Point::ORIGIN, 1.0);
        assert!(find_good_circle(&v, Point::ORIGIN, 0.9 * c0, 0, Some(c0)).is_err());
        assert!(find_good_circle(&v, Point::ORIGIN, 1.1 * c0, 0, Some(c0)).is_ok());
    }

    #[test]
    fn log_atom_patch_circle_avoids_atom_disk() {
        // h = log|z - 0.1| + 3 is positive off a tiny disk about 0.1
        let g = SubharmonicGenerator::new(
            vec![crate::potential::Atom { at: Point::new(0.1, 0.0), weight: 1.0 }],
            3.0,
        )
        .unwrap();
        let v = FinelyOpenPatch::new(Point::ORIGIN, 1.0, g.clone()).unwrap();
        let t = find_good_circle(&v, Point::ORIGIN, 4.0, 1, None).unwrap();
        for k in 0..CIRCLE_SAMPLES {
            let z = Point::polar(t, 2.0 * PI * k as f64 / CIRCLE_SAMPLES as f64);
            assert!(g.eval(z) > 0.0);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn radius_stays_in_interval(c in 1.5f64..16.0, n in 0u32..4, a in 0.05f64..0.9, b in 0.0f64..0.3) {
            let v = PuncturedRegion::disk(Point::ORIGIN, 2.0).without(seg(a, a + b));
            if let Ok(t) = find_good_circle(&v, Point::ORIGIN, c, n, None) {
                let hi = c.powi(-(n as i32));
                prop_assert!(t >= hi / c && t <= hi);
                prop_assert!(t < a - 1e-12 || t > a + b + 1e-12);
            }
        }
    }
}
