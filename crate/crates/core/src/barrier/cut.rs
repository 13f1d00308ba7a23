use std::f64::consts::{FRAC_PI_6, PI, SQRT_2};

use crate::geometry::{CircularArc, Piece, Point, Wedge};
use crate::potential::{find_good_circle, find_wedge, FineRegion};

use super::BarrierError;

/// An arc replaced by the cut construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcCutResult {
    pub original: CircularArc,
    pub cut_point: Point,
    pub cut_radius: f64,
    /// Remaining original arc parts, the detour arc on `C(a, r)`, then the
    /// clipped wedges `L1`, `L2`.
    pub pieces: Vec<Piece>,
    /// Drop in the number of complementary components.
    pub connectivity_delta: u32,
}

/// Local frame at `a`: `u` points away from the arc's centre (the "i"
/// direction) and `t = (u.y, -u.x)` is the matching real direction.
fn frame(arc: &CircularArc, a: Point) -> (Point, Point) {
    let u = (a - arc.center).unit();
    (Point::new(u.y, -u.x), u)
}

/// Part of the wedge `[p, apex, a]` reachable from `a` inside the slab
/// `|(z - a) . u| <= r / 2`, as a polyline starting at `a`.
fn clip_to_slab(w: &Wedge, a: Point, u: Point, r: f64) -> Vec<Point> {
    let im = |z: Point| (z - a).dot(u);
    let limit = 0.5 * r;
    let mut out = vec![a];
    for (from, to) in [(a, w.apex), (w.apex, w.p)] {
        if im(to).abs() <= limit {
            if to != from {
                out.push(to);
            }
            continue;
        }
        let (f0, f1) = (im(from), im(to));
        let target = if f1 > 0.0 { limit } else { -limit };
        let s = ((target - f0) / (f1 - f0)).clamp(0.0, 1.0);
        out.push(from.lerp(to, s));
        break;
    }
    out
}

/// Replaces a neighbourhood of the interior point `a` of `arc`.
///
/// In the local frame the arc runs along the real axis through `a = 0`
/// with its centre below. The open part of the arc in `B(a, r) ∩ {Re < 0}`
/// is removed, the arc `{r e^{i theta} : pi/6 <= theta <= 11 pi/6}` is
/// added, and wedges from `±ir` to `0` inside `u_local`, clipped to
/// `|Im| <= r/2`, reconnect the right half.
pub fn arc_cut<R: FineRegion + ?Sized>(
    arc: &CircularArc,
    a: Point,
    r: f64,
    u_local: &R,
) -> Result<ArcCutResult, BarrierError> {
    let rad = arc.radius;
    if !(r > 0.0 && r < rad) || (a.dist(arc.center) - rad).abs() > 1e-9 * rad {
        return Err(BarrierError::GeometryDegenerate);
    }
    let theta_a_raw = (a - arc.center).angle();
    let phi = 2.0 * (0.5 * r / rad).asin();
    let mut pieces = Vec::new();
    if arc.is_full() {
        let theta_a = theta_a_raw;
        pieces.push(Piece::Arc(CircularArc::new(arc.center, rad, theta_a + phi, theta_a + 2.0 * PI)?));
    } else {
        let off = arc.angle_offset(theta_a_raw);
        if off - phi <= 1e-9 || off + phi >= arc.span() - 1e-9 {
            return Err(BarrierError::GeometryDegenerate);
        }
        let theta_a = arc.theta_start + off;
        pieces.push(Piece::Arc(CircularArc::new(arc.center, rad, arc.theta_start, theta_a)?));
        pieces.push(Piece::Arc(CircularArc::new(arc.center, rad, theta_a + phi, arc.theta_end)?));
    }
    let (t, u) = frame(arc, a);
    let tau = t.angle();
    pieces.push(Piece::Arc(CircularArc::new(a, r, tau + FRAC_PI_6, tau + 11.0 * FRAC_PI_6)?));
    for sign in [1.0, -1.0] {
        let w = find_wedge(a + u * (sign * r), a, u_local, SQRT_2)?;
        pieces.push(Piece::Polyline(clip_to_slab(&w, a, u, r)));
    }
    Ok(ArcCutResult {
        original: *arc,
        cut_point: a,
        cut_radius: r,
        pieces,
        connectivity_delta: 1,
    })
}

/// Largest good-circle radius about `a` in `region` from the ladder
/// `[2^{-k-1}, 2^{-k}]`, with `2^{-k} <= bound`.
pub fn choose_cut_radius<R: FineRegion + ?Sized>(region: &R, a: Point, bound: f64) -> Result<f64, BarrierError> {
    if !(bound > 0.0) {
        return Err(BarrierError::GeometryDegenerate);
    }
    let k0 = (1.0 / bound).log2().ceil().max(0.0) as u32;
    for k in k0..k0 + 16 {
        if let Ok(r) = find_good_circle(region, a, 2.0, k, None) {
            return Ok(r);
        }
    }
    Err(BarrierError::GeometryDegenerate)
}
