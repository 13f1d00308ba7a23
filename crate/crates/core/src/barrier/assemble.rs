use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{
    complement_components, set_distance_with, wedge_hits, CircularArc, DistanceField, GridMask, HitTarget, IRect, Piece,
    Point, Wedge,
};
use crate::par::{self, ExecMode};
use crate::potential::MaskInterior;

use super::cover::{build_circle_cover, extract_arcs, CircleCover};
use super::cut::{arc_cut, choose_cut_radius, ArcCutResult};
use super::graph::ArcGraph;
use super::raster::{rasterize_pieces, HoleWitness, RefinedComplement};
use super::BarrierError;

/// Inputs of one barrier stage.
#[derive(Debug, Clone, Copy)]
pub struct BarrierInputs<'a> {
    pub n: usize,
    pub k_n: &'a GridMask,
    pub k_next: &'a GridMask,
    pub f_n: &'a GridMask,
    pub exceptional: &'a [Point],
    pub frame: IRect,
    pub wedge_trials: usize,
    pub seed: u64,
    pub mode: ExecMode,
}

/// Outcome of the six stage checks.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierCertificates {
    /// (a) `K_n ⊂ K_{n+1}` with a positive margin.
    pub nesting: bool,
    pub nesting_margin: f64,
    /// (b) certified lower bound on `d(K_n, L_n)`.
    pub distance_to_stage: f64,
    pub separated: bool,
    /// (c) every sample ball of `L_n` lies in `K_{n+1}`.
    pub inside_next: bool,
    /// (d) components of `C \ K_n` split by `L_n`.
    pub split_components: Vec<u32>,
    pub connected: bool,
    /// (e) bounded components of `C \ (K_n ∪ L_n)` lacking a witness.
    pub unwitnessed_holes: usize,
    pub holes_witnessed: bool,
    /// (f) Monte Carlo interception.
    pub wedge_trials: usize,
    pub wedge_hits: usize,
    pub wedge_seed: u64,
    pub intercepts: bool,
    pub refine_factor: i64,
}

impl BarrierCertificates {
    pub fn all_hold(&self) -> bool {
        self.nesting && self.separated && self.inside_next && self.connected && self.holes_witnessed && self.intercepts
    }
}

#[derive(Debug, Clone)]
pub struct BarrierStage {
    pub n: usize,
    pub delta_n: f64,
    pub covers: Vec<CircleCover>,
    /// Union-boundary arcs before cutting.
    pub arcs: Vec<CircularArc>,
    pub cuts: Vec<ArcCutResult>,
    /// `L_n` as curves.
    pub pieces: Vec<Piece>,
    /// Cells met by `L_n`.
    pub mask: GridMask,
    /// One complement point per bounded component of `C \ (K_n ∪ L_n)`.
    pub holes: Vec<HoleWitness>,
    pub certificates: BarrierCertificates,
}

fn dist_to_mask(m: &GridMask, p: Point, limit: f64) -> f64 {
    m.distance_to_point(p, limit).unwrap_or(limit)
}

/// Builds `L_n`: covers, union-boundary arcs, then a cut of every arc that
/// still separates two complementary components, in arc order.
pub fn assemble_barrier(inp: &BarrierInputs<'_>) -> Result<BarrierStage, BarrierError> {
    assemble(inp).map_err(|e| BarrierError::Stage { stage: inp.n, source: Box::new(e) })
}

fn assemble(inp: &BarrierInputs<'_>) -> Result<BarrierStage, BarrierError> {
    let grid = inp.k_n.grid();
    let labels = complement_components(inp.k_n, inp.frame)?;
    let (covers, delta_n) = if inp.f_n.is_empty() {
        (Vec::new(), f64::INFINITY)
    } else {
        let covers = build_circle_cover(inp.k_n, inp.k_next, inp.f_n, &labels)?;
        let delta = covers.first().map_or(f64::INFINITY, |c| c.epsilon_bound);
        (covers, delta)
    };
    let arcs: Vec<CircularArc> = covers.iter().flat_map(|c| extract_arcs(c, &labels, grid)).collect();

    let interior = MaskInterior::new(inp.k_next, 0.0);
    let mut graph = ArcGraph::new(&arcs, 1e-9);
    let mut pieces: Vec<Piece> = Vec::new();
    let mut cuts: Vec<ArcCutResult> = Vec::new();
    let reach = 1.0 / (2.0 * inp.n as f64);
    for (e, arc) in arcs.iter().enumerate() {
        if !graph.is_separating(e) {
            pieces.push(Piece::Arc(*arc));
            continue;
        }
        let a = arc.midpoint();
        let mut bound = reach
            .min(dist_to_mask(inp.k_n, a, reach))
            .min(dist_to_mask(inp.f_n, a, reach))
            .min(interior.clearance(a))
            .min(arc.radius);
        if !arc.is_full() {
            bound = bound.min(a.dist(arc.start())).min(a.dist(arc.end()));
        }
        for (k, other) in arcs.iter().enumerate() {
            if k != e {
                bound = bound.min(other.dist_to_point(a));
            }
        }
        for p in &pieces {
            bound = bound.min(p.dist_to_point(a));
        }
        let r = choose_cut_radius(&interior, a, 0.5 * bound)?;
        let mut cut = arc_cut(arc, a, r, &interior)?;
        let before = graph.face_count();
        graph.cut(e);
        cut.connectivity_delta = (before - graph.face_count()) as u32;
        pieces.extend(cut.pieces.iter().cloned());
        cuts.push(cut);
    }

    let certificates_and_holes = certify(inp, &labels, &pieces, &cuts)?;
    let (certificates, holes) = certificates_and_holes;
    Ok(BarrierStage {
        n: inp.n,
        delta_n,
        covers,
        arcs,
        cuts,
        mask: rasterize_pieces(&pieces, grid),
        pieces,
        holes,
        certificates,
    })
}

/// Refinement so that the narrowest cut passage, about `r / 2`, spans at
/// least four fine cells, within a memory budget.
fn refine_factor(h: f64, cuts: &[ArcCutResult], rect: IRect) -> i64 {
    let r_min = cuts.iter().map(|c| c.cut_radius).fold(f64::INFINITY, f64::min);
    let mut f = 4i64;
    while (h / f as f64) > r_min / 8.0 && f < 64 {
        f *= 2;
    }
    while f > 4 && rect.area() as f64 * (f * f) as f64 > 1.2e8 {
        f /= 2;
    }
    f
}

type Certified = (BarrierCertificates, Vec<HoleWitness>);

fn certify(
    inp: &BarrierInputs<'_>,
    labels: &crate::geometry::ComponentLabeling,
    pieces: &[Piece],
    cuts: &[ArcCutResult],
) -> Result<Certified, BarrierError> {
    let grid = inp.k_n.grid();
    let h = grid.h;
    let mode = inp.mode;

    // (a)
    let nesting_margin = if inp.k_n.is_subset_of(inp.k_next) {
        set_distance_with(inp.k_n, &inp.k_next.complement_in(inp.frame), mode)?
    } else {
        0.0
    };

    // (b), (c): samples `s` apart, balls of radius s / 2
    let step = h / 8.0;
    let samples: Vec<Point> = pieces.iter().flat_map(|p| p.sample(step)).collect();
    let outside_k = inp.k_n.complement_in(inp.frame.expand(-1));
    let field = DistanceField::of_complement(&outside_k);
    let lower = par::min_slice(mode, &samples, |&p| {
        let (i, j) = grid.cell_of(p);
        let coarse = field.cell_value(i, j) - h * std::f64::consts::SQRT_2;
        let d = if coarse > 2.0 * h { coarse } else { dist_to_mask(inp.k_n, p, 4.0 * h) };
        d - 0.5 * step
    });
    let distance_to_stage = if samples.is_empty() { f64::INFINITY } else { lower };
    let inside = par::map_slice(mode, &samples, |&p| {
        let (ci, cj) = grid.cell_of(p);
        (-1..=1).all(|di| {
            (-1..=1).all(|dj| {
                let (i, j) = (ci + di, cj + dj);
                grid.point_cell_dist(p, i, j) > 0.5 * step || inp.k_next.contains(i, j)
            })
        })
    });

    // (d), (e)
    let rect = inp.k_next.bbox().union(&inp.k_n.bbox()).expand(3);
    let factor = refine_factor(h, cuts, rect);
    let rc = RefinedComplement::new(inp.k_n, pieces, rect, factor, mode);
    let split_components = rc.split_components(labels);
    let (found, missing) = rc.hole_witnesses(inp.f_n, inp.exceptional);

    // (f)
    let k_cells: Vec<(i64, i64)> = inp.k_n.cells().collect();
    let f_cells: Vec<(i64, i64)> = inp.f_n.cells().collect();
    let trials = if f_cells.is_empty() || pieces.is_empty() { 0 } else { inp.wedge_trials };
    let min_len = 1.0 / inp.n as f64;
    let hits = par::map_range(mode, trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(inp.seed);
        rng.set_stream(t as u64);
        let (ki, kj) = k_cells[rng.gen_range(0..k_cells.len())];
        let (fi, fj) = f_cells[rng.gen_range(0..f_cells.len())];
        let jitter = |rng: &mut ChaCha8Rng| Point::new(rng.gen_range(0.0..h), rng.gen_range(0.0..h));
        let w0 = grid.cell_corner(ki, kj) + jitter(&mut rng);
        let z0 = grid.cell_corner(fi, fj) + jitter(&mut rng);
        let d = w0.dist(z0);
        let y_min = ((0.5 * min_len).powi(2) - (0.5 * d).powi(2)).max(0.0).sqrt();
        let y = (y_min * (1.0 + 1e-9) + rng.gen_range(0.0..d)) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let w = Wedge::with_height(w0, z0, y);
        debug_assert!(w.total_length() >= min_len);
        wedge_hits(&w, HitTarget::Pieces(pieces))
    });
    let wedge_hits_count = hits.iter().filter(|x| **x).count();

    let certificates = BarrierCertificates {
        nesting: nesting_margin > 0.0,
        nesting_margin,
        distance_to_stage,
        separated: distance_to_stage > 0.0,
        inside_next: inside.iter().all(|x| *x),
        connected: split_components.is_empty(),
        split_components,
        unwitnessed_holes: missing.len(),
        holes_witnessed: missing.is_empty(),
        wedge_trials: trials,
        wedge_hits: wedge_hits_count,
        wedge_seed: inp.seed,
        intercepts: wedge_hits_count == trials,
        refine_factor: factor,
    };
    Ok((certificates, found.into_values().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exhaustion::{build_fine_exhaustion, DomainDescription, Primitive};
    use crate::geometry::Grid;

    fn punctured_disc() -> (crate::exhaustion::FSigmaDomain, crate::exhaustion::ExhaustionSequence) {
        let u = DomainDescription {
            primitives: vec![Primitive::Disk { center: Point::ORIGIN, radius: 1.0 }],
            exceptional: vec![Point::ORIGIN],
            insets: vec![0.4, 0.3, 0.2],
            puncture_radii: vec![0.2, 0.12, 0.06],
            window: [-1.5, -1.5, 1.5, 1.5],
        }
        .rasterize(1.0 / 64.0, ExecMode::Parallel)
        .unwrap();
        let seq = build_fine_exhaustion(&u).unwrap();
        (u, seq)
    }

    #[test]
    fn punctured_disc_stage_is_certified() {
        let (u, seq) = punctured_disc();
        let inp = BarrierInputs {
            n: 1,
            k_n: &seq.stage(1),
            k_next: &seq.stage(2),
            f_n: u.complement_compact(1),
            exceptional: &u.exceptional_points,
            frame: u.frame,
            wedge_trials: 2000,
            seed: 7,
            mode: ExecMode::Parallel,
        };
        let st = assemble_barrier(&inp).unwrap();
        let c = &st.certificates;
        assert!(c.all_hold(), "{c:?}");
        assert!(c.distance_to_stage > 0.0);
        assert_eq!(c.wedge_hits, 2000);
        assert!(!st.pieces.is_empty());
        assert!(st.cuts.iter().all(|c| c.connectivity_delta == 1));
        // the puncture hole is bounded and holds only the exceptional point
        assert!(st.holes.iter().all(|w| w.exceptional || u.complement_compact(1).contains_point(w.at)));
    }

    #[test]
    fn modes_agree() {
        let (u, seq) = punctured_disc();
        let mk = |mode| BarrierInputs {
            n: 1,
            k_n: &seq.stage(1),
            k_next: &seq.stage(2),
            f_n: u.complement_compact(1),
            exceptional: &u.exceptional_points,
            frame: u.frame,
            wedge_trials: 300,
            seed: 3,
            mode,
        };
        let a = assemble_barrier(&mk(ExecMode::Sequential)).unwrap();
        let b = assemble_barrier(&mk(ExecMode::Parallel)).unwrap();
        assert_eq!(a.certificates, b.certificates);
        assert_eq!(a.pieces.len(), b.pieces.len());
    }

    #[test]
    fn empty_complement_gives_empty_barrier() {
        let g = Grid::new(Point::ORIGIN, 1.0 / 32.0);
        let frame = g.rect_covering(-2.0, -2.0, 2.0, 2.0);
        let disk = |r: f64| GridMask::from_centers(g, frame, ExecMode::Sequential, move |p| p.norm() <= r);
        let (k, k2, f) = (disk(0.5), disk(1.0), GridMask::empty(g));
        let st = assemble_barrier(&BarrierInputs {
            n: 1,
            k_n: &k,
            k_next: &k2,
            f_n: &f,
            exceptional: &[],
            frame,
            wedge_trials: 100,
            seed: 0,
            mode: ExecMode::Sequential,
        })
        .unwrap();
        assert!(st.pieces.is_empty() && st.mask.is_empty());
        assert_eq!(st.certificates.wedge_trials, 0);
        assert!(st.certificates.all_hold());
    }
}
