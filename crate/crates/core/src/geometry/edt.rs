//! Exact Euclidean distance transform (Felzenszwalb-Huttenlocher) on cell
//! centers.

use super::mask::{Grid, GridMask, IRect};
use super::point::Point;

/// Distance from every cell center of `rect` to the nearest center of a
/// cell outside the mask. Cells outside `rect` count as outside the mask.
#[derive(Debug, Clone)]
pub struct DistanceField {
    grid: Grid,
    rect: IRect,
    dist: Vec<f64>,
}

const BIG: f64 = 1e30;

fn transform_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let mut s;
        loop {
            let p = v[k];
            s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            // z[0] is -inf, so k never underflows
            if s <= z[k] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
}

impl DistanceField {
    /// Field of the mask's complement over the mask's bounding box plus one cell.
    pub fn of_complement(mask: &GridMask) -> Self {
        let rect = mask.bbox().expand(1);
        let (w, hgt) = (rect.width(), rect.height());
        let mut sq: Vec<f64> = (0..rect.area())
            .map(|idx| {
                let (i, j) = rect.cell_at(idx);
                if mask.contains(i, j) {
                    BIG
                } else {
                    0.0
                }
            })
            .collect();
        let n = w.max(hgt);
        let mut v = vec![0usize; n];
        let mut z = vec![0.0f64; n + 1];
        let mut buf_in = vec![0.0; n];
        let mut buf_out = vec![0.0; n];
        for x in 0..w {
            for y in 0..hgt {
                buf_in[y] = sq[y * w + x];
            }
            transform_1d(&buf_in[..hgt], &mut buf_out[..hgt], &mut v, &mut z);
            for y in 0..hgt {
                sq[y * w + x] = buf_out[y];
            }
        }
        for y in 0..hgt {
            buf_in[..w].copy_from_slice(&sq[y * w..(y + 1) * w]);
            transform_1d(&buf_in[..w], &mut buf_out[..w], &mut v, &mut z);
            sq[y * w..(y + 1) * w].copy_from_slice(&buf_out[..w]);
        }
        let h = mask.grid().h;
        DistanceField {
            grid: mask.grid(),
            rect,
            dist: sq.into_iter().map(|d| d.sqrt() * h).collect(),
        }
    }

    /// Center-to-center distance for cell `(i, j)`; zero outside the field.
    pub fn cell_value(&self, i: i64, j: i64) -> f64 {
        if self.rect.contains(i, j) {
            self.dist[self.rect.index(i, j)]
        } else {
            0.0
        }
    }

    /// Conservative lower bound on the distance from `z` to the closed
    /// complement cells.
    pub fn clearance(&self, z: Point) -> f64 {
        let (i, j) = self.grid.cell_of(z);
        let d = self.cell_value(i, j);
        if d == 0.0 {
            return 0.0;
        }
        (d - self.grid.h * std::f64::consts::SQRT_2).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::ExecMode;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force() {
        let g = Grid::new(Point::ORIGIN, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let cells: Vec<(i64, i64)> = (0..300).map(|_| (rng.gen_range(0..25), rng.gen_range(0..20))).collect();
            let m = GridMask::from_cells(g, cells);
            let f = DistanceField::of_complement(&m);
            let rect = m.bbox().expand(1);
            let outside: Vec<(i64, i64)> = (0..rect.area()).map(|k| rect.cell_at(k)).filter(|&(i, j)| !m.contains(i, j)).collect();
            for k in 0..rect.area() {
                let (i, j) = rect.cell_at(k);
                let brute = outside
                    .iter()
                    .map(|&(a, b)| (((a - i) * (a - i) + (b - j) * (b - j)) as f64).sqrt() * g.h)
                    .fold(f64::INFINITY, f64::min);
                assert!((f.cell_value(i, j) - brute).abs() < 1e-9, "cell {i},{j}");
            }
        }
    }

    #[test]
    fn clearance_is_conservative() {
        let g = Grid::new(Point::ORIGIN, 1.0 / 32.0);
        let m = GridMask::from_centers(g, g.rect_covering(-1.5, -1.5, 1.5, 1.5), ExecMode::Sequential, |p| p.norm() <= 1.0);
        let f = DistanceField::of_complement(&m);
        for k in 0..200 {
            let p = Point::polar(0.9 * (k as f64 / 200.0), k as f64);
            let c = f.clearance(p);
            let true_gap = 1.0 - p.norm();
            assert!(c <= true_gap + g.h, "clearance {c} vs {true_gap}");
            assert!(c >= true_gap - 3.0 * g.h);
        }
    }
}
