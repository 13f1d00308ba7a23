use std::f64::consts::{PI, TAU};

use super::mask::GridMask;
use super::point::{point_segment_dist, Point};
use super::{GeometryError, PREDICATE_TOL};

/// Closed line segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn dist_to_point(&self, p: Point) -> f64 {
        point_segment_dist(p, self.a, self.b)
    }

    pub fn point_at(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }

    /// Closed-segment intersection up to the absolute predicate tolerance.
    pub fn intersects_segment(&self, o: &Segment) -> bool {
        let tol = PREDICATE_TOL;
        if self.dist_to_point(o.a) <= tol
            || self.dist_to_point(o.b) <= tol
            || o.dist_to_point(self.a) <= tol
            || o.dist_to_point(self.b) <= tol
        {
            return true;
        }
        let d1 = (self.b - self.a).cross(o.a - self.a);
        let d2 = (self.b - self.a).cross(o.b - self.a);
        let d3 = (o.b - o.a).cross(self.a - o.a);
        let d4 = (o.b - o.a).cross(self.b - o.a);
        d1 * d2 < 0.0 && d3 * d4 < 0.0
    }

    /// Parameters `t` in `[0, 1]` where the segment meets the full circle.
    pub fn circle_params(&self, center: Point, radius: f64) -> Vec<f64> {
        let d = self.b - self.a;
        let f = self.a - center;
        let a = d.dot(d);
        if a == 0.0 {
            return Vec::new();
        }
        let b = 2.0 * f.dot(d);
        let c = f.dot(f) - radius * radius;
        let len = a.sqrt();
        let slack = PREDICATE_TOL / len;
        let mut disc = b * b - 4.0 * a * c;
        // near-tangent within tolerance counts as touching
        if disc < 0.0 {
            let t = (-b / (2.0 * a)).clamp(0.0, 1.0);
            if (self.point_at(t).dist(center) - radius).abs() <= PREDICATE_TOL {
                disc = 0.0;
            } else {
                return Vec::new();
            }
        }
        let sq = disc.sqrt();
        [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)]
            .into_iter()
            .filter(|t| *t >= -slack && *t <= 1.0 + slack)
            .map(|t| t.clamp(0.0, 1.0))
            .collect()
    }

    /// Whether the segment meets the closed cell `(i, j)` of `mask`'s grid.
    pub fn intersects_cell(&self, mask: &GridMask, i: i64, j: i64) -> bool {
        let g = mask.grid();
        let c = g.cell_corner(i, j);
        let tol = PREDICATE_TOL;
        let (xmin, xmax) = (c.x - tol, c.x + g.h + tol);
        let (ymin, ymax) = (c.y - tol, c.y + g.h + tol);
        // Liang-Barsky clip
        let d = self.b - self.a;
        let mut t0 = 0.0f64;
        let mut t1 = 1.0f64;
        for (p, q) in [
            (-d.x, self.a.x - xmin),
            (d.x, xmax - self.a.x),
            (-d.y, self.a.y - ymin),
            (d.y, ymax - self.a.y),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return false;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    t0 = t0.max(r);
                } else {
                    t1 = t1.min(r);
                }
            }
        }
        t0 <= t1
    }

    /// Whether the segment meets the closed set of `mask`.
    pub fn intersects_mask(&self, mask: &GridMask) -> bool {
        if mask.is_empty() {
            return false;
        }
        let g = mask.grid();
        let n = ((self.length() / (0.5 * g.h)).ceil() as usize).max(1);
        let mut last = None;
        for k in 0..=n {
            let p = self.point_at(k as f64 / n as f64);
            let cell = g.cell_of(p);
            if last == Some(cell) {
                continue;
            }
            last = Some(cell);
            for di in -1..=1 {
                for dj in -1..=1 {
                    let (i, j) = (cell.0 + di, cell.1 + dj);
                    if mask.contains(i, j) && self.intersects_cell(mask, i, j) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Closed circular arc `{center + radius e^{i t} : theta_start <= t <= theta_end}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularArc {
    pub center: Point,
    pub radius: f64,
    pub theta_start: f64,
    pub theta_end: f64,
}

impl CircularArc {
    pub fn new(center: Point, radius: f64, theta_start: f64, theta_end: f64) -> Result<Self, GeometryError> {
        let span = theta_end - theta_start;
        if !(radius > 0.0) || !(span > 0.0) || span > TAU + 1e-12 {
            return Err(GeometryError::InvalidArc);
        }
        Ok(CircularArc {
            center,
            radius,
            theta_start,
            theta_end: theta_start + span.min(TAU),
        })
    }

    pub fn full_circle(center: Point, radius: f64) -> Self {
        CircularArc {
            center,
            radius,
            theta_start: 0.0,
            theta_end: TAU,
        }
    }

    pub fn span(&self) -> f64 {
        self.theta_end - self.theta_start
    }

    pub fn is_full(&self) -> bool {
        self.span() >= TAU
    }

    pub fn length(&self) -> f64 {
        self.radius * self.span()
    }

    pub fn point_at_angle(&self, theta: f64) -> Point {
        self.center + Point::polar(self.radius, theta)
    }

    pub fn start(&self) -> Point {
        self.point_at_angle(self.theta_start)
    }

    pub fn end(&self) -> Point {
        self.point_at_angle(self.theta_end)
    }

    pub fn midpoint_angle(&self) -> f64 {
        0.5 * (self.theta_start + self.theta_end)
    }

    pub fn midpoint(&self) -> Point {
        self.point_at_angle(self.midpoint_angle())
    }

    /// Offset of `theta` past the start angle, reduced to `[0, 2 pi)`.
    pub fn angle_offset(&self, theta: f64) -> f64 {
        (theta - self.theta_start).rem_euclid(TAU)
    }

    /// Angle membership with an angular slack of `slack` radians.
    pub fn contains_angle(&self, theta: f64, slack: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let off = self.angle_offset(theta);
        off <= self.span() + slack || off >= TAU - slack
    }

    pub fn dist_to_point(&self, p: Point) -> f64 {
        let v = p - self.center;
        if v.norm() == 0.0 {
            return self.radius;
        }
        if self.contains_angle(v.angle(), 0.0) {
            (v.norm() - self.radius).abs()
        } else {
            p.dist(self.start()).min(p.dist(self.end()))
        }
    }

    /// Points along the arc with spacing at most `step` (endpoints included).
    pub fn sample(&self, step: f64) -> Vec<Point> {
        let n = ((self.length() / step).ceil() as usize).max(1);
        (0..=n)
            .map(|k| self.point_at_angle(self.theta_start + self.span() * k as f64 / n as f64))
            .collect()
    }

    pub fn intersects_segment(&self, s: &Segment) -> bool {
        let slack = PREDICATE_TOL / self.radius;
        if s.circle_params(self.center, self.radius)
            .into_iter()
            .any(|t| self.contains_angle((s.point_at(t) - self.center).angle(), slack))
        {
            return true;
        }
        if self.is_full() {
            return false;
        }
        s.dist_to_point(self.start()) <= PREDICATE_TOL || s.dist_to_point(self.end()) <= PREDICATE_TOL
    }

    /// Angles (on this arc's circle) where it crosses the circle `(c, r)`.
    pub fn circle_intersection_angles(&self, c: Point, r: f64) -> Vec<f64> {
        circle_circle_angles(self.center, self.radius, c, r)
    }
}

/// Angles on circle `(c0, r0)` of its intersections with circle `(c1, r1)`.
/// Empty when disjoint, nested or concentric; a tangency yields one angle.
pub fn circle_circle_angles(c0: Point, r0: f64, c1: Point, r1: f64) -> Vec<f64> {
    let d = c0.dist(c1);
    if d == 0.0 || d > r0 + r1 || d < (r0 - r1).abs() {
        return Vec::new();
    }
    let base = (c1 - c0).angle();
    let cos = ((d * d + r0 * r0 - r1 * r1) / (2.0 * d * r0)).clamp(-1.0, 1.0);
    let half = cos.acos();
    if half == 0.0 || half == PI {
        vec![base + half]
    } else {
        vec![base - half, base + half]
    }
}

/// Two-segment path `[p, apex] u [apex, q]` with legs of equal length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wedge {
    pub p: Point,
    pub apex: Point,
    pub q: Point,
}

impl Wedge {
    pub fn new(p: Point, apex: Point, q: Point) -> Result<Self, GeometryError> {
        let w = Wedge { p, apex, q };
        if !(p.is_finite() && apex.is_finite() && q.is_finite()) {
            return Err(GeometryError::InvalidWedge);
        }
        let tol = 1e-9 * p.dist(q).max(f64::MIN_POSITIVE);
        if (p.dist(apex) - apex.dist(q)).abs() > tol.max(PREDICATE_TOL) {
            return Err(GeometryError::InvalidWedge);
        }
        Ok(w)
    }

    /// Wedge with apex on the perpendicular bisector of `[p, q]` at signed
    /// offset `height` from the midpoint.
    pub fn with_height(p: Point, q: Point, height: f64) -> Self {
        let dir = (q - p).unit().perp();
        Wedge {
            p,
            apex: p.midpoint(q) + dir * height,
            q,
        }
    }

    pub fn leg(&self) -> f64 {
        self.p.dist(self.apex)
    }

    pub fn total_length(&self) -> f64 {
        self.p.dist(self.apex) + self.apex.dist(self.q)
    }

    pub fn segments(&self) -> [Segment; 2] {
        [Segment::new(self.p, self.apex), Segment::new(self.apex, self.q)]
    }
}

/// Closed planar pieces that barrier sets are assembled from.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    Arc(CircularArc),
    Polyline(Vec<Point>),
}

impl Piece {
    pub fn segments(&self) -> Vec<Segment> {
        match self {
            Piece::Arc(_) => Vec::new(),
            Piece::Polyline(pts) => pts.windows(2).map(|w| Segment::new(w[0], w[1])).collect(),
        }
    }

    pub fn intersects_segment(&self, s: &Segment) -> bool {
        match self {
            Piece::Arc(a) => a.intersects_segment(s),
            Piece::Polyline(_) => self.segments().iter().any(|t| t.intersects_segment(s)),
        }
    }

    pub fn dist_to_point(&self, p: Point) -> f64 {
        match self {
            Piece::Arc(a) => a.dist_to_point(p),
            Piece::Polyline(pts) => {
                if pts.len() == 1 {
                    return pts[0].dist(p);
                }
                self.segments()
                    .iter()
                    .map(|s| s.dist_to_point(p))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn sample(&self, step: f64) -> Vec<Point> {
        match self {
            Piece::Arc(a) => a.sample(step),
            Piece::Polyline(pts) => {
                let mut out = Vec::new();
                for s in self.segments() {
                    let n = ((s.length() / step).ceil() as usize).max(1);
                    out.extend((0..n).map(|k| s.point_at(k as f64 / n as f64)));
                }
                if let Some(last) = pts.last() {
                    out.push(*last);
                }
                out
            }
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            Piece::Arc(a) => a.length(),
            Piece::Polyline(_) => self.segments().iter().map(Segment::length).sum(),
        }
    }
}

/// Set a wedge can be tested against.
pub enum HitTarget<'a> {
    Mask(&'a GridMask),
    Pieces(&'a [Piece]),
}

/// Whether either leg of the wedge meets the closed set `target`.
pub fn wedge_hits(w: &Wedge, target: HitTarget<'_>) -> bool {
    let segs = w.segments();
    match target {
        HitTarget::Mask(m) => segs.iter().any(|s| s.intersects_mask(m)),
        HitTarget::Pieces(ps) => ps
            .iter()
            .any(|piece| segs.iter().any(|s| piece.intersects_segment(s))),
    }
}

/// Points where the wedge meets the pieces: exact crossings for arcs,
/// segment crossings for polylines.
pub fn wedge_hit_points(w: &Wedge, pieces: &[Piece]) -> Vec<Point> {
    let mut out = Vec::new();
    for s in w.segments() {
        for piece in pieces {
            match piece {
                Piece::Arc(a) => {
                    let slack = PREDICATE_TOL / a.radius;
                    for t in s.circle_params(a.center, a.radius) {
                        let p = s.point_at(t);
                        if a.contains_angle((p - a.center).angle(), slack) {
                            out.push(p);
                        }
                    }
                }
                Piece::Polyline(_) => {
                    for t in piece.segments() {
                        if let Some(p) = segment_crossing(&s, &t) {
                            out.push(p);
                        }
                    }
                }
            }
        }
    }
    out
}

fn segment_crossing(s: &Segment, t: &Segment) -> Option<Point> {
    if !s.intersects_segment(t) {
        return None;
    }
    let r = s.b - s.a;
    let q = t.b - t.a;
    let den = r.cross(q);
    if den.abs() < 1e-300 {
        // collinear overlap: report the nearest endpoint
        return Some(if s.dist_to_point(t.a) <= s.dist_to_point(t.b) { t.a } else { t.b });
    }
    let u = (t.a - s.a).cross(q) / den;
    Some(s.point_at(u.clamp(0.0, 1.0)))
}
