use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{complement_components, GridMask, Point};

use super::PotentialError;

/// Self-energy of the uniform measure on a unit segment, `3/2`, added to
/// `-log(spacing)` on the diagonal.
const SEGMENT_SELF_ENERGY: f64 = 1.5;
const MAX_ITERATIONS: usize = 10_000;
const ENERGY_TOL: f64 = 1e-10;

/// Finitely supported probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub support: Vec<Point>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn uniform(support: Vec<Point>) -> Self {
        let w = 1.0 / support.len() as f64;
        let weights = vec![w; support.len()];
        DiscreteMeasure { support, weights }
    }

    /// `sum_i w_i log(1 / |z - x_i|)`.
    pub fn potential(&self, z: Point) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| -w * z.dist(*x).ln())
            .sum()
    }

    /// `k` support points splitting the measure into equal masses, taken in
    /// support order at the levels `(j + 1/2) / k`.
    pub fn quantiles(&self, k: usize) -> Vec<Point> {
        let mut out = Vec::with_capacity(k);
        let mut acc = 0.0;
        let mut idx = 0;
        for j in 0..k {
            let level = (j as f64 + 0.5) / k as f64;
            while idx + 1 < self.support.len() && acc + self.weights[idx] < level {
                acc += self.weights[idx];
                idx += 1;
            }
            out.push(self.support[idx]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub measure: DiscreteMeasure,
    /// Minimal discrete energy; `+inf` for polar sets.
    pub energy: f64,
    pub capacity: f64,
    pub polar: bool,
    pub iterations: usize,
}

/// Centers of the cells of `k` that touch the unbounded complementary
/// component, ordered by angle about their centroid and then
/// lexicographically.
pub fn outer_boundary(k: &GridMask) -> Result<Vec<Point>, PotentialError> {
    if k.is_empty() {
        return Err(PotentialError::EmptyMask);
    }
    let labels = complement_components(k, k.bbox().expand(2)).expect("frame has a two-cell margin");
    let outer = Some(labels.unbounded_id);
    let g = k.grid();
    let mut cells: Vec<(i64, i64)> = k
        .boundary_cells()
        .into_iter()
        .filter(|&(i, j)| [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|(di, dj)| labels.label(i + di, j + dj) == outer))
        .collect();
    let n = cells.len() as f64;
    let centroid = cells
        .iter()
        .fold(Point::ORIGIN, |s, &(i, j)| s + g.cell_center(i, j) * (1.0 / n));
    cells.sort_by(|&a, &b| {
        let ta = (g.cell_center(a.0, a.1) - centroid).angle();
        let tb = (g.cell_center(b.0, b.1) - centroid).angle();
        ta.total_cmp(&tb).then(a.cmp(&b))
    });
    Ok(cells.into_iter().map(|(i, j)| g.cell_center(i, j)).collect())
}

fn energy(a: &DMatrix<f64>, lambda: &DVector<f64>) -> f64 {
    lambda.dot(&(a * lambda))
}

/// Discrete equilibrium measure of `k` on `m` outer-boundary points.
///
/// The support is `m` evenly spaced points of [`outer_boundary`] starting at
/// a seeded offset. Energy `sum_ij l_i l_j A_ij` with `A_ij = -log|x_i - x_j|`
/// off the diagonal and the self-energy of a spacing-length segment on it.
/// Minimized by exponentiated-gradient steps on the simplex, warm-started
/// from the unconstrained stationary point when that point is positive.
pub fn equilibrium_measure(k: &GridMask, m: usize, seed: u64) -> Result<Equilibrium, PotentialError> {
    if m == 0 {
        return Err(PotentialError::InvalidParameter("support size must be positive".into()));
    }
    if k.count() == 1 {
        return Err(PotentialError::DegenerateSet);
    }
    let boundary = outer_boundary(k)?;
    let n = boundary.len();
    let support: Vec<Point> = if m >= n {
        boundary
    } else {
        let stride = n as f64 / m as f64;
        let offset = ChaCha8Rng::seed_from_u64(seed).gen_range(0.0..stride);
        (0..m).map(|t| boundary[((offset + t as f64 * stride) as usize).min(n - 1)]).collect()
    };
    Ok(minimize_energy(support))
}

/// Equilibrium measure of an ordered curve sample, spread back onto every
/// point. `m` evenly spaced points (seeded offset) carry the solve; each
/// one's mass is shared uniformly by the points up to the next support
/// point, so [`DiscreteMeasure::quantiles`] can resolve finer than `m`.
pub fn equilibrium_along(points: &[Point], m: usize, seed: u64) -> Result<DiscreteMeasure, PotentialError> {
    let n = points.len();
    if n == 0 {
        return Err(PotentialError::EmptyMask);
    }
    if m == 0 {
        return Err(PotentialError::InvalidParameter("support size must be positive".into()));
    }
    if points.iter().all(|p| *p == points[0]) {
        return Err(PotentialError::DegenerateSet);
    }
    let m = m.min(n);
    let stride = n as f64 / m as f64;
    let offset = ChaCha8Rng::seed_from_u64(seed).gen_range(0.0..stride);
    let idx: Vec<usize> = (0..m).map(|t| ((offset + t as f64 * stride) as usize).min(n - 1)).collect();
    let eq = minimize_energy(idx.iter().map(|&i| points[i]).collect());
    let mut weights = vec![0.0; n];
    for t in 0..m {
        // support point t owns the cyclic run idx[t] .. idx[t + 1]
        let start = idx[t];
        let end = if t + 1 < m { idx[t + 1] } else { idx[0] + n };
        let len = (end - start).max(1);
        for q in start..start + len {
            weights[q % n] += eq.measure.weights[t] / len as f64;
        }
    }
    Ok(DiscreteMeasure { support: points.to_vec(), weights })
}

/// The first `n` points of a Leja sequence drawn from `candidates`: each
/// point maximizes the product of distances to the ones already chosen,
/// starting from the candidate farthest from the centroid. Ties go to the
/// lowest index.
pub fn leja_points(candidates: &[Point], n: usize) -> Vec<Point> {
    let m = candidates.len();
    if m == 0 || n == 0 {
        return Vec::new();
    }
    let centroid = candidates.iter().fold(Point::ORIGIN, |s, p| s + *p * (1.0 / m as f64));
    let mut score: Vec<f64> = candidates.iter().map(|p| p.dist(centroid).ln()).collect();
    let mut out = Vec::with_capacity(n.min(m));
    for _ in 0..n.min(m) {
        let best = (0..m).fold(0, |b, i| if score[i] > score[b] { i } else { b });
        let z = candidates[best];
        out.push(z);
        for (i, c) in candidates.iter().enumerate() {
            score[i] = if i == best { f64::NEG_INFINITY } else { score[i] + c.dist(z).ln() };
        }
        if out.len() == 1 {
            // the centroid term only picks the start
            for (i, c) in candidates.iter().enumerate() {
                if i != best {
                    score[i] = c.dist(z).ln();
                }
            }
        }
    }
    out
}

/// Capacity of a finite point set: always zero.
pub fn point_set_capacity(points: &[Point]) -> Result<Equilibrium, PotentialError> {
    if points.is_empty() {
        return Err(PotentialError::EmptyMask);
    }
    Ok(Equilibrium {
        measure: DiscreteMeasure::uniform(points.to_vec()),
        energy: f64::INFINITY,
        capacity: 0.0,
        polar: true,
        iterations: 0,
    })
}

fn minimize_energy(support: Vec<Point>) -> Equilibrium {
    let m = support.len();
    let mut a = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        let mut spacing = f64::INFINITY;
        for j in 0..m {
            if i != j {
                let d = support[i].dist(support[j]);
                a[(i, j)] = -d.ln();
                spacing = spacing.min(d);
            }
        }
        a[(i, i)] = if m == 1 { 0.0 } else { -spacing.ln() + SEGMENT_SELF_ENERGY };
    }
    let uniform = DVector::from_element(m, 1.0 / m as f64);
    let mut lambda = match a.clone().lu().solve(&DVector::from_element(m, 1.0)) {
        Some(x) if x.iter().all(|v| *v > 0.0 && v.is_finite()) => {
            let s = x.sum();
            x / s
        }
        _ => uniform,
    };
    let mut e = energy(&a, &lambda);
    let mut eta = 1.0;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && eta > 1e-14 {
        iterations += 1;
        let grad = (&a * &lambda) * 2.0;
        let gmin = grad.min();
        let mut next = lambda.zip_map(&grad, |l, g| l * (-eta * (g - gmin)).exp());
        let s = next.sum();
        next /= s;
        let e_next = energy(&a, &next);
        if e_next <= e {
            let change = e - e_next;
            lambda = next;
            e = e_next;
            eta *= 1.5;
            if change < ENERGY_TOL {
                break;
            }
        } else {
            eta *= 0.5;
        }
    }
    Equilibrium {
        measure: DiscreteMeasure {
            support,
            weights: lambda.iter().copied().collect(),
        },
        energy: e,
        capacity: (-e).exp(),
        polar: false,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;
    use crate::par::ExecMode;

    fn ring(r: f64, h: f64) -> GridMask {
        let g = Grid::new(Point::ORIGIN, h);
        GridMask::from_centers(g, g.rect_covering(-r - 0.1, -r - 0.1, r + 0.1, r + 0.1), ExecMode::Parallel, |p| {
            (p.norm() - r).abs() <= 0.5 * h
        })
    }

    fn disk(r: f64, h: f64) -> GridMask {
        let g = Grid::new(Point::ORIGIN, h);
        GridMask::from_centers(g, g.rect_covering(-r - 0.1, -r - 0.1, r + 0.1, r + 0.1), ExecMode::Parallel, |p| {
            p.norm() <= r
        })
    }

    /// Capacity of `[-l/2, l/2]` is `l/4`: the Joukowski map
    /// `z = (l/4)(w + 1/w)` sends `|w| > 1` onto its complement with
    /// derivative `l/4` at infinity.
    fn segment_capacity_oracle(l: f64) -> f64 {
        l / 4.0
    }

    #[test]
    fn circle_capacity_is_radius() {
        let eq = equilibrium_measure(&ring(0.5, 1.0 / 1024.0), 256, 7).unwrap();
        assert!((eq.capacity - 0.5).abs() < 0.005, "cap {}", eq.capacity);
        // uniform in the weak sense: each quadrant carries a quarter
        let mut quad = [0.0; 4];
        for (x, w) in eq.measure.support.iter().zip(&eq.measure.weights) {
            quad[((x.angle() + std::f64::consts::PI) / std::f64::consts::FRAC_PI_2) as usize % 4] += w;
        }
        for q in quad {
            assert!((q - 0.25).abs() < 0.005, "quadrant mass {q}");
        }
    }

    #[test]
    fn segment_capacity_is_quarter_length() {
        let h = 1.0 / 1024.0;
        let g = Grid::new(Point::ORIGIN, h);
        let seg = GridMask::from_fn(g, g.rect_covering(-0.5, 0.0, 0.5 - h, 0.0), ExecMode::Sequential, |_, _| true);
        let l = seg.count() as f64 * h;
        let eq = equilibrium_measure(&seg, 512, 1).unwrap();
        let want = segment_capacity_oracle(l);
        assert!((eq.capacity / want - 1.0).abs() < 0.02, "cap {} vs {want}", eq.capacity);
    }

    #[test]
    fn finite_sets_are_polar() {
        let eq = point_set_capacity(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).unwrap();
        assert_eq!(eq.capacity, 0.0);
        assert!(eq.polar);
        let g = Grid::new(Point::ORIGIN, 0.1);
        let one = GridMask::from_cells(g, [(3, 4)]);
        assert_eq!(equilibrium_measure(&one, 4, 0), Err(PotentialError::DegenerateSet));
    }

    #[test]
    fn capacity_scales_and_is_monotone() {
        let h = 1.0 / 512.0;
        let small = equilibrium_measure(&disk(0.2, h), 256, 3).unwrap().capacity;
        let large = equilibrium_measure(&disk(0.4, h), 256, 3).unwrap().capacity;
        assert!((large / small - 2.0).abs() < 0.04, "{small} {large}");
        assert!(small <= large);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let k = disk(0.3, 1.0 / 256.0);
        assert_eq!(equilibrium_measure(&k, 64, 11).unwrap(), equilibrium_measure(&k, 64, 11).unwrap());
    }

    #[test]
    fn leja_points_on_a_circle_spread_out() {
        let cand: Vec<Point> = (0..360).map(|k| Point::polar(1.0, k as f64 * std::f64::consts::TAU / 360.0)).collect();
        let pts = leja_points(&cand, 8);
        assert_eq!(pts.len(), 8);
        // consecutive Leja points on a circle bisect the largest gap: eight of them are evenly spaced
        let mut ang: Vec<f64> = pts.iter().map(|p| p.angle().rem_euclid(std::f64::consts::TAU)).collect();
        ang.sort_by(f64::total_cmp);
        for w in ang.windows(2) {
            assert!((w[1] - w[0] - std::f64::consts::TAU / 8.0).abs() < 1e-9);
        }
        assert_eq!(leja_points(&cand, 1000).len(), 360);
    }

    #[test]
    fn quantiles_of_uniform_measure() {
        let pts: Vec<Point> = (0..8).map(|k| Point::new(k as f64, 0.0)).collect();
        let q = DiscreteMeasure::uniform(pts).quantiles(4);
        let xs: Vec<f64> = q.iter().map(|p| p.x).collect();
        assert!(xs.windows(2).all(|w| w[1] - w[0] == 2.0), "{xs:?}");
    }
}
