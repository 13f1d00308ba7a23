use std::f64::consts::TAU;

use crate::geometry::{circle_circle_angles, CircularArc, ComponentLabeling, GridMask, Point};
use crate::potential::{find_good_circle, MaskInterior};

use super::BarrierError;

/// Circles centred on the boundary of one complementary component of `K_n`
/// whose open disks cover that boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleCover {
    /// Full circles.
    pub circles: Vec<CircularArc>,
    pub host_component: u32,
    /// `delta_n`; every radius lies below it.
    pub epsilon_bound: f64,
}

/// Unit edges between a cell of `K_n` and a cell of component `id`, ordered
/// by angle about their centroid.
pub(crate) fn component_edges(k: &GridMask, labels: &ComponentLabeling, id: u32) -> Vec<(Point, Point)> {
    let g = k.grid();
    let mut edges = Vec::new();
    for (i, j) in k.boundary_cells() {
        for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            if labels.label(i + di, j + dj) != Some(id) {
                continue;
            }
            let c = |a: i64, b: i64| g.cell_corner(a, b);
            edges.push(match (di, dj) {
                (1, 0) => (c(i + 1, j), c(i + 1, j + 1)),
                (-1, 0) => (c(i, j), c(i, j + 1)),
                (0, 1) => (c(i, j + 1), c(i + 1, j + 1)),
                _ => (c(i, j), c(i + 1, j)),
            });
        }
    }
    if edges.is_empty() {
        return edges;
    }
    let inv = 1.0 / edges.len() as f64;
    let centroid = edges.iter().fold(Point::ORIGIN, |s, e| s + e.0.midpoint(e.1) * inv);
    let key = |e: &(Point, Point)| {
        let m = e.0.midpoint(e.1);
        ((m - centroid).angle(), m.x, m.y)
    };
    edges.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(ka.2.total_cmp(&kb.2))
    });
    edges
}

fn strictly_inside(p: Point, c: &CircularArc) -> bool {
    p.dist(c.center) < c.radius * (1.0 - 1e-12)
}

/// Greedy covers of `∂D` for every component `D` of `C \ K_n` meeting `F_n`.
///
/// An edge is covered once both endpoints lie in one open disk. A new circle
/// is centred at the first uncovered edge's midpoint, with radius from the
/// good-circle ladder `C = 2` below half of `min(delta_n, clearance in K_{n+1})`.
pub fn build_circle_cover(
    k_n: &GridMask,
    k_next: &GridMask,
    f_n: &GridMask,
    labels: &ComponentLabeling,
) -> Result<Vec<CircleCover>, BarrierError> {
    let h = k_n.grid().h;
    let delta = crate::geometry::set_distance(k_n, f_n)?;
    if delta <= 2.0 * h {
        return Err(BarrierError::SeparationFailure { delta });
    }
    let hosts: std::collections::BTreeSet<u32> = f_n.cells().filter_map(|(i, j)| labels.label(i, j)).collect();
    let interior = MaskInterior::new(k_next, 0.0);
    let mut covers = Vec::new();
    for id in hosts {
        let mut circles: Vec<CircularArc> = Vec::new();
        for (p, q) in component_edges(k_n, labels, id) {
            if circles.iter().any(|c| strictly_inside(p, c) && strictly_inside(q, c)) {
                continue;
            }
            let z = p.midpoint(q);
            let bound = 0.5 * delta.min(interior.clearance(z));
            if bound <= 0.5 * h {
                return Err(BarrierError::CoverFailure { at: z });
            }
            let k0 = (1.0 / bound).log2().ceil().max(0.0) as u32;
            let eps = (k0..k0 + 8)
                .find_map(|k| find_good_circle(&interior, z, 2.0, k, None).ok())
                .ok_or(BarrierError::CoverFailure { at: z })?;
            let c = CircularArc::full_circle(z, eps);
            if !(strictly_inside(p, &c) && strictly_inside(q, &c)) {
                return Err(BarrierError::CoverFailure { at: z });
            }
            circles.push(c);
        }
        covers.push(CircleCover {
            circles,
            host_component: id,
            epsilon_bound: delta,
        });
    }
    Ok(covers)
}

/// Closed arcs of `∂(union of open disks)`: each circle minus the open
/// angular intervals lying inside the other disks. Zero-length remnants
/// (tangencies) are discarded.
pub fn boundary_arcs(circles: &[CircularArc]) -> Vec<CircularArc> {
    let mut out = Vec::new();
    for (j, cj) in circles.iter().enumerate() {
        let mut covered: Vec<(f64, f64)> = Vec::new();
        let mut swallowed = false;
        for (i, ci) in circles.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = cj.center.dist(ci.center);
            if d + cj.radius <= ci.radius {
                swallowed = true;
                break;
            }
            if let [lo, hi] = circle_circle_angles(cj.center, cj.radius, ci.center, ci.radius)[..] {
                covered.push((lo.rem_euclid(TAU), hi - lo));
            }
        }
        if swallowed {
            continue;
        }
        if covered.is_empty() {
            out.push(CircularArc::full_circle(cj.center, cj.radius));
            continue;
        }
        // split wrapped intervals, then take the complement in [0, 2 pi]
        let mut pieces: Vec<(f64, f64)> = Vec::new();
        for (lo, w) in covered {
            let hi = lo + w;
            if hi > TAU {
                pieces.push((lo, TAU));
                pieces.push((0.0, hi - TAU));
            } else {
                pieces.push((lo, hi));
            }
        }
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut free = Vec::new();
        let mut cursor = 0.0;
        for (lo, hi) in pieces {
            if lo > cursor {
                free.push((cursor, lo));
            }
            cursor = f64::max(cursor, hi);
        }
        if cursor < TAU {
            free.push((cursor, TAU));
        }
        // a gap ending at 2 pi continues into one starting at 0
        if free.len() >= 2 && free[0].0 == 0.0 && free.last().unwrap().1 == TAU {
            let (a, _) = free.pop().unwrap();
            free[0] = (a, free[0].1 + TAU);
        }
        for (a, b) in free {
            if b - a > 1e-12 {
                out.push(CircularArc::new(cj.center, cj.radius, a, b).expect("positive span"));
            }
        }
    }
    out
}

/// Arcs of the cover's union boundary lying in the host component.
pub fn extract_arcs(cover: &CircleCover, labels: &ComponentLabeling, grid: crate::geometry::Grid) -> Vec<CircularArc> {
    boundary_arcs(&cover.circles)
        .into_iter()
        .filter(|a| {
            let (i, j) = grid.cell_of(a.midpoint());
            labels.label(i, j) == Some(cover.host_component)
        })
        .collect()
}
