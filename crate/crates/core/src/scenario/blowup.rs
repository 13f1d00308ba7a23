//! Monte-Carlo replay of the contradiction step: a bounded extension near a
//! point of `F` would have to stay below `M` along a short wedge, yet every
//! qualifying wedge crosses some `L_n` where `|f| > M`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{wedge_hit_points, wedge_hits, GridMask, HitTarget, Piece, Point, Wedge};
use crate::par::{self, ExecMode};
use crate::runge::Evaluate;

use super::report::CertificateReport;
use super::ScenarioError;

/// Attempts drawn per qualifying trial before giving up.
pub const MAX_ATTEMPTS_PER_TRIAL: usize = 50;
const BATCH: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupOptions {
    pub bound: f64,
    pub trials: usize,
    pub alpha: f64,
    pub seed: u64,
    pub mode: ExecMode,
}

/// Stage data the check needs, all 1-based by position `n - 1`.
#[derive(Debug, Clone, Copy)]
pub struct BlowupInputs<'a> {
    pub k: &'a [GridMask],
    pub f: &'a [GridMask],
    pub l: &'a [Vec<Piece>],
}

/// One drawn wedge from `w0` to `z0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrialOutcome {
    /// No `n <= N` satisfies every selection condition.
    InsufficientStages,
    /// The wedge meets `L_n`; `ln_min_abs` is `ln min |f|` over the crossings.
    Checked { n: usize, hit: bool, ln_min_abs: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupRecord {
    pub bound: f64,
    pub alpha: f64,
    pub seed: u64,
    pub attempts: usize,
    pub insufficient_stages: usize,
    pub qualifying: usize,
    pub intercepted: usize,
    pub above_bound: usize,
    /// Smallest stage any qualifying wedge used.
    pub min_stage: usize,
    pub ln_min_abs: f64,
}

impl BlowupRecord {
    pub fn hit_rate(&self) -> f64 {
        if self.qualifying == 0 {
            0.0
        } else {
            self.intercepted as f64 / self.qualifying as f64
        }
    }

    /// Every qualifying wedge met its `L_n` with `|f| > M` there.
    pub fn holds(&self, trials: usize) -> bool {
        self.qualifying == trials && self.intercepted == trials && self.above_bound == trials
    }
}

/// Guaranteed lower bound for `|f|` on `L_n`.
pub fn stage_floor(n: usize) -> f64 {
    n as f64 - 0.5f64.powi(n as i32 - 1)
}

/// Exposed edges of `F`, as `(cell, start, direction)`.
fn exposed_edges(f: &GridMask) -> Vec<((i64, i64), Point, Point)> {
    let g = f.grid();
    let mut out = Vec::new();
    for (i, j) in f.boundary_cells() {
        let c = g.cell_corner(i, j);
        for ((di, dj), start, dir) in [
            ((1, 0), c + Point::new(g.h, 0.0), Point::new(0.0, g.h)),
            ((-1, 0), c, Point::new(0.0, g.h)),
            ((0, 1), c + Point::new(0.0, g.h), Point::new(g.h, 0.0)),
            ((0, -1), c, Point::new(g.h, 0.0)),
        ] {
            if !f.contains(i + di, j + dj) {
                out.push(((i, j), start, dir));
            }
        }
    }
    out
}

/// Samples `z0` on an exposed edge of `F_N`, `w0` in a cell of `K_N` and a
/// wedge from `w0` to `z0` shorter than `alpha |w0 - z0|`, then checks the
/// first stage `n` with `w0 in K_n`, `z0 in F_n`, `n - 2^-(n-1) > M` and
/// `4/n` below the wedge length.
pub fn certify_blowup_mechanics<E: Evaluate + ?Sized>(
    inp: &BlowupInputs<'_>,
    f: &E,
    opts: &BlowupOptions,
) -> Result<BlowupRecord, ScenarioError> {
    let stages = inp.k.len();
    if stages == 0 || inp.f.len() != stages || inp.l.len() != stages {
        return Err(ScenarioError::Artifact("blow-up check needs K_n, F_n and L_n for every stage".into()));
    }
    if !(opts.bound >= 0.0) || !(opts.alpha > 1.0) {
        return Err(ScenarioError::Config("blow-up needs M >= 0 and alpha > 1".into()));
    }
    if stage_floor(stages) <= opts.bound {
        return Err(ScenarioError::InsufficientStages { bound: opts.bound, stages });
    }
    let k_last = &inp.k[stages - 1];
    let f_last = &inp.f[stages - 1];
    let edges = exposed_edges(f_last);
    let k_cells: Vec<(i64, i64)> = k_last.cells().collect();
    if edges.is_empty() || k_cells.is_empty() {
        return Err(ScenarioError::Artifact("empty K_N or F_N".into()));
    }
    let g = k_last.grid();
    let slope = (opts.alpha * opts.alpha - 1.0).sqrt() * (1.0 - 1e-9);

    let attempt = |t: usize| -> TrialOutcome {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(t as u64);
        let (z_cell, start, dir) = edges[rng.gen_range(0..edges.len())];
        let z0 = start + dir * rng.gen_range(0.0..1.0);
        let (i, j) = k_cells[rng.gen_range(0..k_cells.len())];
        let w0 = g.cell_corner(i, j) + Point::new(rng.gen_range(0.0..g.h), rng.gen_range(0.0..g.h));
        let half = 0.5 * w0.dist(z0);
        let wedge = Wedge::with_height(w0, z0, rng.gen_range(-1.0..1.0) * slope * half);
        let length = wedge.total_length();
        let (wi, wj) = g.cell_of(w0);
        let n = (1..=stages).find(|&n| {
            inp.k[n - 1].contains(wi, wj)
                && inp.f[n - 1].contains(z_cell.0, z_cell.1)
                && stage_floor(n) > opts.bound
                && 4.0 / (n as f64) < length
        });
        let Some(n) = n else { return TrialOutcome::InsufficientStages };
        let pieces = &inp.l[n - 1];
        let hit = wedge_hits(&wedge, HitTarget::Pieces(pieces));
        let ln_min_abs = wedge_hit_points(&wedge, pieces)
            .into_iter()
            .map(|z| f.eval_log(z).map_or(f64::NEG_INFINITY, |v| v.ln_abs))
            .fold(f64::INFINITY, f64::min);
        // A touching hit without a crossing point certifies nothing.
        let ln_min_abs = if ln_min_abs == f64::INFINITY { f64::NEG_INFINITY } else { ln_min_abs };
        TrialOutcome::Checked { n, hit, ln_min_abs }
    };

    let mut rec = BlowupRecord {
        bound: opts.bound,
        alpha: opts.alpha,
        seed: opts.seed,
        attempts: 0,
        insufficient_stages: 0,
        qualifying: 0,
        intercepted: 0,
        above_bound: 0,
        min_stage: usize::MAX,
        ln_min_abs: f64::INFINITY,
    };
    let ln_bound = opts.bound.ln();
    let cap = opts.trials.saturating_mul(MAX_ATTEMPTS_PER_TRIAL);
    'batches: while rec.qualifying < opts.trials && rec.attempts < cap {
        let base = rec.attempts;
        let count = BATCH.min(cap - base);
        let outcomes = par::map_range(opts.mode, count, |t| attempt(base + t));
        for o in outcomes {
            rec.attempts += 1;
            match o {
                TrialOutcome::InsufficientStages => rec.insufficient_stages += 1,
                TrialOutcome::Checked { n, hit, ln_min_abs } => {
                    rec.qualifying += 1;
                    rec.min_stage = rec.min_stage.min(n);
                    if hit {
                        rec.intercepted += 1;
                        rec.ln_min_abs = rec.ln_min_abs.min(ln_min_abs);
                        if ln_min_abs > ln_bound {
                            rec.above_bound += 1;
                        }
                    }
                    if rec.qualifying == opts.trials {
                        break 'batches;
                    }
                }
            }
        }
    }
    Ok(rec)
}

/// Report for one blow-up check; the verdict fails on any missed or small hit.
pub fn blowup_report(scenario: &str, rec: &BlowupRecord, trials: usize) -> CertificateReport {
    let mut r = CertificateReport::default();
    r.section("blowup")
        .put("scenario", scenario)
        .put_f64("bound", rec.bound)
        .put_f64("alpha", rec.alpha)
        .put("seed", rec.seed)
        .put("trials", trials)
        .put("attempts", rec.attempts)
        .put("insufficient_stages", rec.insufficient_stages)
        .put("qualifying", rec.qualifying)
        .put("intercepted", rec.intercepted)
        .put("above_bound", rec.above_bound)
        .put("min_stage", if rec.qualifying == 0 { 0 } else { rec.min_stage })
        .put_f64("ln_min_abs_at_hits", rec.ln_min_abs)
        .put_f64("hit_rate", rec.hit_rate());
    let pass = rec.holds(trials);
    r.section("verdict").put("pass", pass).put("failures", if pass { "" } else { "blowup" });
    r
}
