use std::collections::BTreeMap;

use crate::geometry::{complement_components, GridMask, Piece, Point};
use crate::par::{self, ExecMode};
use crate::potential::leja_points;

use super::logval::ln_sum_exp;
use super::rational::{ln_dist_bounds, PoleAttestation, RationalFunction, ScaledProduct, Term};
use super::RungeError;

/// Samples whose closed balls of radius `radius` cover a set.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<Point>,
    pub radius: f64,
}

impl SampleSet {
    /// `per_edge` points on every cell edge between `mask` and its complement.
    /// A function holomorphic near `mask` takes its maximum modulus there.
    pub fn from_mask_boundary(mask: &GridMask, per_edge: usize) -> Self {
        let g = mask.grid();
        let mut points = Vec::new();
        for (i, j) in mask.boundary_cells() {
            let c = g.cell_corner(i, j);
            let edges = [
                ((1, 0), c + Point::new(g.h, 0.0), Point::new(0.0, g.h)),
                ((-1, 0), c, Point::new(0.0, g.h)),
                ((0, 1), c + Point::new(0.0, g.h), Point::new(g.h, 0.0)),
                ((0, -1), c, Point::new(g.h, 0.0)),
            ];
            for ((di, dj), start, dir) in edges {
                if !mask.contains(i + di, j + dj) {
                    points.extend((0..per_edge).map(|t| start + dir * ((t as f64 + 0.5) / per_edge as f64)));
                }
            }
        }
        SampleSet { points, radius: 0.5 * g.h / per_edge as f64 * (1.0 + 1e-9) }
    }

    /// A `per_side x per_side` lattice in every cell.
    pub fn from_mask_cells(mask: &GridMask, per_side: usize) -> Self {
        let g = mask.grid();
        let s = g.h / per_side as f64;
        let points = mask
            .cells()
            .flat_map(|(i, j)| {
                let c = g.cell_corner(i, j);
                (0..per_side * per_side)
                    .map(move |t| c + Point::new(((t % per_side) as f64 + 0.5) * s, ((t / per_side) as f64 + 0.5) * s))
            })
            .collect();
        SampleSet { points, radius: s * std::f64::consts::FRAC_1_SQRT_2 * (1.0 + 1e-9) }
    }

    /// Points at most `step` apart along every piece.
    pub fn from_pieces(pieces: &[Piece], step: f64) -> Self {
        SampleSet { points: pieces.iter().flat_map(|p| p.sample(step)).collect(), radius: 0.5 * step * (1.0 + 1e-9) }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

/// A candidate pole location and whether it is known to lie off the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleSite {
    pub at: Point,
    pub in_complement: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitStrategy {
    Zero,
    SinglePole { order: usize },
    RootPower { roots_per_term: usize, powers: Vec<u32> },
}

/// Certified `ln max |R|` over the `K` samples' balls and `ln min |R|` over the `L` ones.
#[derive(Debug, Clone, PartialEq)]
pub struct FitCertificate {
    pub ln_max_on_k: f64,
    pub ln_min_on_l: f64,
    pub ln_low: f64,
    pub ln_high: f64,
    pub k_samples: usize,
    pub l_samples: usize,
    pub strategy: FitStrategy,
}

impl FitCertificate {
    pub fn holds(&self) -> bool {
        self.ln_max_on_k < self.ln_low && self.ln_min_on_l > self.ln_high
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelFit {
    pub rational: RationalFunction,
    pub certificate: FitCertificate,
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub per_edge: usize,
    pub seed: u64,
    pub mode: ExecMode,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { per_edge: 64, seed: 0, mode: ExecMode::default() }
    }
}

/// Largest admissible single-pole order.
pub const MAX_POLE_ORDER: usize = 64;
/// Root counts tried in turn by the factored construction.
const ROOT_LADDER: [usize; 7] = [64, 128, 256, 512, 1024, 2048, 4096];

/// Certified bounds of `ln|R|` over sample balls: max over `k`, min over `l`.
pub fn certify_two_level(r: &RationalFunction, k: &SampleSet, l: &SampleSet, mode: ExecMode) -> (f64, f64) {
    let hi = par::max_slice(mode, &k.points, |&z| r.ball_bounds(z, k.radius).1);
    let lo = par::min_slice(mode, &l.points, |&z| r.ball_bounds(z, l.radius).0);
    (if k.is_empty() { f64::NEG_INFINITY } else { hi }, if l.is_empty() { f64::INFINITY } else { lo })
}

/// A rational function below `low` on `K` and above `exp(ln_high)` on `L`,
/// with poles only at `pole_sites`.
///
/// A single pole `c (z - p)^-m` is tried first; it works when `L` is closer
/// to `p` than `K` is. Otherwise every component of `C \ K` meeting `L`
/// receives one factored term whose roots are a Leja sequence on the
/// component's boundary, with a pole at the site inside bounded components.
pub fn fit_two_level_rational(
    k: &GridMask,
    l: &SampleSet,
    pole_sites: &[PoleSite],
    low: f64,
    ln_high: f64,
    opts: &FitOptions,
) -> Result<TwoLevelFit, RungeError> {
    let k_samples = SampleSet::from_mask_boundary(k, opts.per_edge);
    fit_with_samples(k, &k_samples, l, pole_sites, low, ln_high, opts)
}

pub fn fit_with_samples(
    k: &GridMask,
    k_samples: &SampleSet,
    l: &SampleSet,
    pole_sites: &[PoleSite],
    low: f64,
    ln_high: f64,
    opts: &FitOptions,
) -> Result<TwoLevelFit, RungeError> {
    if !(low > 0.0) || ln_high.is_nan() {
        return Err(RungeError::InvalidParameter("low must be positive".into()));
    }
    let ln_low = low.ln();
    let cert = |r: &RationalFunction, strategy: FitStrategy| {
        let (a, b) = certify_two_level(r, k_samples, l, opts.mode);
        FitCertificate {
            ln_max_on_k: a,
            ln_min_on_l: b,
            ln_low,
            ln_high,
            k_samples: k_samples.len(),
            l_samples: l.len(),
            strategy,
        }
    };
    if l.is_empty() {
        let r = RationalFunction::zero();
        let c = cert(&r, FitStrategy::Zero);
        return Ok(TwoLevelFit { rational: r, certificate: c });
    }
    if k_samples.is_empty() {
        return Err(RungeError::InvalidParameter("K is empty".into()));
    }
    if let Some(fit) = single_pole(k_samples, l, pole_sites, ln_low, ln_high, &cert) {
        return Ok(fit);
    }
    root_power(k, k_samples, l, pole_sites, ln_low, ln_high, opts, &cert)
}

fn single_pole(
    k: &SampleSet,
    l: &SampleSet,
    sites: &[PoleSite],
    ln_low: f64,
    ln_high: f64,
    cert: &dyn Fn(&RationalFunction, FitStrategy) -> FitCertificate,
) -> Option<TwoLevelFit> {
    for site in sites {
        let p = site.at;
        let d_k = k.points.iter().map(|z| z.dist(p) - k.radius).fold(f64::INFINITY, f64::min);
        let d_l = l.points.iter().map(|z| z.dist(p) + l.radius).fold(0.0, f64::max);
        if !(d_k > d_l) {
            continue;
        }
        let ratio = (d_k / d_l).ln();
        let m = ((ln_high - ln_low) / ratio).floor().max(0.0) as usize + 1;
        if m > MAX_POLE_ORDER {
            continue;
        }
        // halfway, in log scale, between the two admissible extremes of c
        let ln_c = 0.5 * ((ln_low + m as f64 * d_k.ln()) + (ln_high + m as f64 * d_l.ln()));
        if ln_c.abs() > 700.0 {
            continue;
        }
        let mut r = RationalFunction::single_pole(p, m, num_complex::Complex64::new(ln_c.exp(), 0.0));
        r.pole_attestations.push(PoleAttestation { pole: p, in_complement: site.in_complement });
        let c = cert(&r, FitStrategy::SinglePole { order: m });
        if c.holds() {
            return Some(TwoLevelFit { rational: r, certificate: c });
        }
    }
    None
}

/// Running interval bounds of `ln|q|` for one plan's unit term on the
/// K and L samples, where `q` is the Leja prefix over the pole power.
struct Screen {
    done: usize,
    k: Vec<(ScaledProduct, ScaledProduct)>,
    l: Vec<(ScaledProduct, ScaledProduct)>,
}

impl Screen {
    fn new(plan: &Plan, k_samples: &SampleSet) -> Self {
        let fresh = (ScaledProduct::new(), ScaledProduct::new());
        Screen { done: 0, k: vec![fresh; k_samples.len()], l: vec![fresh; plan.l_points.len()] }
    }

    /// Extends the products to `n` roots and returns `(max upper on K, min lower on L)`.
    fn advance(&mut self, plan: &Plan, k_samples: &SampleSet, l: &SampleSet, n: usize, mode: ExecMode) -> (f64, f64) {
        let n = n.min(plan.leja.len());
        let roots = &plan.leja[self.done..n];
        let step = |z: Point, rho: f64, (mut lo, mut hi): (ScaledProduct, ScaledProduct)| {
            for r in roots {
                let d = z.dist(*r);
                lo.mul((d - rho).max(0.0));
                hi.mul(d + rho);
            }
            (lo, hi)
        };
        let kz: Vec<(Point, (ScaledProduct, ScaledProduct))> = k_samples.points.iter().copied().zip(self.k.iter().copied()).collect();
        self.k = par::map_slice(mode, &kz, |&(z, s)| step(z, k_samples.radius, s));
        let lz: Vec<(Point, (ScaledProduct, ScaledProduct))> = plan.l_points.iter().copied().zip(self.l.iter().copied()).collect();
        self.l = par::map_slice(mode, &lz, |&(z, s)| step(z, l.radius, s));
        self.done = n;
        let nf = n as f64;
        let pole_adj = |z: Point, rho: f64| match plan.pole {
            Some(p) => ln_dist_bounds(z.dist(p.at), rho),
            None => (0.0, 0.0),
        };
        let hi = k_samples
            .points
            .iter()
            .zip(&self.k)
            .map(|(&z, (_, h))| h.ln() - nf * pole_adj(z, k_samples.radius).0)
            .fold(f64::NEG_INFINITY, f64::max);
        let lo = plan
            .l_points
            .iter()
            .zip(&self.l)
            .map(|(&z, (lo, _))| lo.ln() - nf * pole_adj(z, l.radius).1)
            .fold(f64::INFINITY, f64::min);
        (hi, lo)
    }
}

/// One complementary component of `K` that meets `L`.
struct Plan {
    pole: Option<PoleSite>,
    /// Leja sequence on the component's boundary cells, chosen where the
    /// component is unbounded (inverted about the pole for bounded ones).
    leja: Vec<Point>,
    l_points: Vec<Point>,
}

#[allow(clippy::too_many_arguments)]
fn root_power(
    k: &GridMask,
    k_samples: &SampleSet,
    l: &SampleSet,
    sites: &[PoleSite],
    ln_low: f64,
    ln_high: f64,
    opts: &FitOptions,
    cert: &dyn Fn(&RationalFunction, FitStrategy) -> FitCertificate,
) -> Result<TwoLevelFit, RungeError> {
    let g = k.grid();
    let mut rect = k.bbox();
    for p in &l.points {
        let (i, j) = g.cell_of(*p);
        rect = rect.union(&crate::geometry::IRect::new(i, j, i + 1, j + 1));
    }
    for s in sites {
        let (i, j) = g.cell_of(s.at);
        rect = rect.union(&crate::geometry::IRect::new(i, j, i + 1, j + 1));
    }
    let labels = complement_components(k, rect.expand(2))?;
    let mut groups: BTreeMap<u32, Vec<Point>> = BTreeMap::new();
    for p in &l.points {
        let (i, j) = g.cell_of(*p);
        let id = labels.label(i, j).ok_or(RungeError::InvalidParameter("L meets K".into()))?;
        groups.entry(id).or_default().push(*p);
    }
    let mut plans = Vec::new();
    for (id, l_points) in groups {
        let pole = if id == labels.unbounded_id {
            None
        } else {
            let site = sites.iter().find(|s| {
                let (i, j) = g.cell_of(s.at);
                labels.label(i, j) == Some(id)
            });
            match site {
                Some(s) => Some(*s),
                None => {
                    return Err(RungeError::FitFailed {
                        ln_max_on_k: f64::NAN,
                        ln_min_on_l: f64::NAN,
                        reason: format!("no pole site in the bounded component holding L near {:?}", l_points[0]),
                    })
                }
            }
        };
        let cells: Vec<(i64, i64)> = k
            .boundary_cells()
            .into_iter()
            .filter(|&(i, j)| [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|(di, dj)| labels.label(i + di, j + dj) == Some(id)))
            .collect();
        // Candidates are the K boundary samples on the edges facing this
        // component; cell centers alone run out before the ladder does.
        let cell_set: std::collections::HashSet<(i64, i64)> = cells.iter().copied().collect();
        let boundary: Vec<Point> = k_samples
            .points
            .iter()
            .copied()
            .filter(|&z| {
                let (i, j) = g.cell_of(z);
                cell_set.contains(&(i, j)) || labels.label(i, j) == Some(id)
            })
            .collect();
        let max_roots = ROOT_LADDER[ROOT_LADDER.len() - 1];
        let leja = match pole {
            Some(s) => {
                let inv = |d: Point| {
                    let n2 = d.dot(d);
                    Point::new(d.x / n2, -d.y / n2)
                };
                let images: Vec<Point> = boundary.iter().map(|z| inv(*z - s.at)).collect();
                leja_points(&images, max_roots).into_iter().map(|w| s.at + inv(w)).collect()
            }
            None => leja_points(&boundary, max_roots),
        };
        plans.push(Plan { pole, leja, l_points });
    }

    let terms = plans.len() as f64;
    let ln_small = ln_low - (2.0 * terms).ln();
    let ln_big = ln_sum_exp([ln_high, ln_low]) + 2f64.ln();
    let mut best = (f64::INFINITY, f64::NEG_INFINITY);
    // Root sets are prefixes of one Leja sequence, so the per-sample
    // distance products carry over from one rung to the next.
    let mut screens: Vec<Screen> = plans.iter().map(|p| Screen::new(p, k_samples)).collect();
    for &n_roots in &ROOT_LADDER {
        let units: Vec<Term> = plans
            .iter()
            .map(|p| {
                Term::RootPower {
                    roots: p.leja[..n_roots.min(p.leja.len())].to_vec(),
                    pole: p.pole.map(|s| s.at),
                    power: 1,
                    ln_scale: 0.0,
                    phase: 0.0,
                }
            })
            .collect();
        let gaps: Vec<(f64, f64)> =
            screens.iter_mut().zip(&plans).map(|(sc, p)| sc.advance(p, k_samples, l, n_roots, opts.mode)).collect();
        if gaps.iter().any(|(hi, lo)| !(lo > hi)) {
            continue;
        }
        let mut powers: Vec<u32> = gaps
            .iter()
            .map(|(hi, lo)| ((ln_big - ln_small) / (lo - hi)).ceil().max(1.0).min(u32::MAX as f64 / 4.0) as u32)
            .collect();
        for _ in 0..3 {
            let mut r = RationalFunction::zero();
            for (t, unit) in units.iter().enumerate() {
                if let Term::RootPower { roots, pole, .. } = unit {
                    let kp = powers[t] as f64;
                    r.terms.push(Term::RootPower {
                        roots: roots.clone(),
                        pole: *pole,
                        power: powers[t],
                        ln_scale: ln_small - kp * gaps[t].0,
                        phase: 0.0,
                    });
                }
                if let Some(s) = plans[t].pole {
                    r.pole_attestations.push(PoleAttestation { pole: s.at, in_complement: s.in_complement });
                }
            }
            let c = cert(&r, FitStrategy::RootPower { roots_per_term: n_roots, powers: powers.clone() });
            if c.holds() {
                return Ok(TwoLevelFit { rational: r, certificate: c });
            }
            if c.ln_min_on_l - c.ln_high > best.1 - ln_high {
                best = (c.ln_max_on_k, c.ln_min_on_l);
            }
            for p in powers.iter_mut() {
                *p = p.saturating_mul(2);
            }
        }
    }
    Err(RungeError::FitFailed {
        ln_max_on_k: best.0,
        ln_min_on_l: best.1,
        reason: format!("no certified fit with up to {} roots per term", ROOT_LADDER[ROOT_LADDER.len() - 1]),
    })
}
