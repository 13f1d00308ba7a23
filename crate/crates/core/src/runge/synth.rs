use crate::geometry::{Grid, GridMask, IRect, Point};
use crate::par::{self, ExecMode};

use super::fit::{fit_with_samples, FitCertificate, FitOptions, PoleSite, SampleSet};
use super::logval::{ln_diff_exp, ln_sum_exp, LogValue};
use super::rational::RationalFunction;
use super::RungeError;

/// Something that can be evaluated away from a finite pole set.
pub trait Evaluate: Sync {
    fn eval_log(&self, z: Point) -> Result<LogValue, RungeError>;
    fn pole_points(&self) -> Vec<Point>;
}

impl Evaluate for RationalFunction {
    fn eval_log(&self, z: Point) -> Result<LogValue, RungeError> {
        RationalFunction::eval_log(self, z)
    }

    fn pole_points(&self) -> Vec<Point> {
        self.poles().into_iter().map(|p| p.0).collect()
    }
}

/// What one stage must achieve: small on `K_n`, large on `L_n`.
#[derive(Debug, Clone)]
pub struct StagePlan {
    pub k: GridMask,
    pub l: SampleSet,
    pub pole_sites: Vec<PoleSite>,
}

/// `low_n = 2^-n` and `high_n = sum_{j<n} max_{L_n} |R_j| + n`, in log scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageBudget {
    pub ln_low: f64,
    pub ln_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageCertificate {
    pub n: usize,
    pub fit: FitCertificate,
    /// `|R_n| < 2^-n` on `K_n`, equivalently `|f_n - f_(n-1)| < 2^-n`.
    pub small_on_k: bool,
    /// `|R_n| > high_n` on `L_n`.
    pub large_on_l: bool,
    /// Certified lower bound of `ln|f_n|` on `L_n`.
    pub ln_min_partial_on_l: f64,
    /// `|f_n| > n` on `L_n`.
    pub partial_exceeds_n: bool,
    /// Certified lower bound of `ln|f_N|` on `L_n`, `N` the last stage.
    pub ln_min_final_on_l: f64,
    /// `|f_N| > n - 2^-n` on `L_n`.
    pub tail_holds: bool,
}

impl StageCertificate {
    pub fn all_hold(&self) -> bool {
        self.small_on_k && self.large_on_l && self.partial_exceeds_n && self.tail_holds
    }
}

/// Partial sums `f_k = R_1 + ... + R_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedFunction {
    pub stages: Vec<RationalFunction>,
    pub budgets: Vec<StageBudget>,
    pub certificates: Vec<StageCertificate>,
}

/// `f_k` for a fixed `k`.
#[derive(Debug, Clone, Copy)]
pub struct PartialSum<'a> {
    pub terms: &'a [RationalFunction],
}

impl Evaluate for PartialSum<'_> {
    fn eval_log(&self, z: Point) -> Result<LogValue, RungeError> {
        let parts = self.terms.iter().map(|r| r.eval_log(z)).collect::<Result<Vec<_>, _>>()?;
        Ok(LogValue::sum(&parts))
    }

    fn pole_points(&self) -> Vec<Point> {
        self.terms.iter().flat_map(|r| r.pole_points()).collect()
    }
}

impl SynthesizedFunction {
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// `f_k`; `k` is clamped to the number of stages.
    pub fn partial(&self, k: usize) -> PartialSum<'_> {
        PartialSum { terms: &self.stages[..k.min(self.stages.len())] }
    }

    pub fn all_hold(&self) -> bool {
        self.certificates.iter().all(StageCertificate::all_hold)
    }
}

impl Evaluate for SynthesizedFunction {
    fn eval_log(&self, z: Point) -> Result<LogValue, RungeError> {
        self.partial(self.stages.len()).eval_log(z)
    }

    fn pole_points(&self) -> Vec<Point> {
        self.partial(self.stages.len()).pole_points()
    }
}

fn upper_on(r: &RationalFunction, s: &SampleSet, mode: ExecMode) -> Vec<f64> {
    par::map_slice(mode, &s.points, |&z| r.ball_bounds(z, s.radius).1)
}

/// Fits `R_1, R_2, ...` in order with the recursive budgets, then
/// certifies every stage against all computed partial sums.
pub fn synthesize(plans: &[StagePlan], opts: &FitOptions) -> Result<SynthesizedFunction, RungeError> {
    let mode = opts.mode;
    let mut stages: Vec<RationalFunction> = Vec::new();
    let mut budgets = Vec::new();
    let mut fits = Vec::new();
    for (idx, plan) in plans.iter().enumerate() {
        let n = idx + 1;
        let maxima: Vec<f64> = stages
            .iter()
            .map(|r| upper_on(r, &plan.l, mode).into_iter().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let ln_high = ln_sum_exp(maxima.into_iter().chain([(n as f64).ln()]));
        let low = 0.5f64.powi(n as i32);
        let k_samples = SampleSet::from_mask_boundary(&plan.k, opts.per_edge);
        let fit = fit_with_samples(&plan.k, &k_samples, &plan.l, &plan.pole_sites, low, ln_high, opts)
            .map_err(|e| RungeError::Stage { stage: n, source: Box::new(e) })?;
        budgets.push(StageBudget { ln_low: low.ln(), ln_high });
        stages.push(fit.rational);
        fits.push(fit.certificate);
    }

    let last = stages.len();
    let mut certificates = Vec::new();
    for (idx, plan) in plans.iter().enumerate() {
        let n = idx + 1;
        let l = &plan.l;
        let uppers: Vec<Vec<f64>> = stages.iter().map(|r| upper_on(r, l, mode)).collect();
        let lower_n = par::map_slice(mode, &l.points, |&z| stages[idx].ball_bounds(z, l.radius).0);
        let bound = |upto: usize| {
            (0..l.len())
                .map(|s| {
                    let rest = ln_sum_exp((0..upto).filter(|j| *j != idx).map(|j| uppers[j][s]));
                    ln_diff_exp(lower_n[s], rest)
                })
                .fold(f64::INFINITY, f64::min)
        };
        let ln_min_partial_on_l = bound(n);
        let ln_min_final_on_l = bound(last);
        let fit = fits[idx].clone();
        let tail_target = n as f64 - 0.5f64.powi(n as i32);
        certificates.push(StageCertificate {
            n,
            small_on_k: fit.ln_max_on_k < fit.ln_low,
            large_on_l: fit.ln_min_on_l > fit.ln_high,
            fit,
            ln_min_partial_on_l,
            partial_exceeds_n: ln_min_partial_on_l > (n as f64).ln(),
            ln_min_final_on_l,
            tail_holds: ln_min_final_on_l > tail_target.ln(),
        });
    }
    Ok(SynthesizedFunction { stages, budgets, certificates })
}

/// `f` at every cell center of `rect`; `None` next to a pole.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueGrid {
    pub grid: Grid,
    pub rect: IRect,
    pub values: Vec<Option<LogValue>>,
}

impl ValueGrid {
    pub fn skipped(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

pub fn eval_grid<F: Evaluate + ?Sized>(f: &F, grid: Grid, rect: IRect, mode: ExecMode) -> ValueGrid {
    let values = par::map_range(mode, rect.area(), |idx| {
        let (i, j) = rect.cell_at(idx);
        f.eval_log(grid.cell_center(i, j)).ok()
    });
    ValueGrid { grid, rect, values }
}

/// Smallest distance from `z` to the poles of `f`.
pub fn pole_distance<F: Evaluate + ?Sized>(f: &F, z: Point) -> f64 {
    f.pole_points().iter().map(|p| p.dist(z)).fold(f64::INFINITY, f64::min)
}
