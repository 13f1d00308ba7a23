use std::time::Instant;

use num_complex::Complex64;

use crate::barrier::{assemble_barrier, BarrierInputs, BarrierStage};
use crate::exhaustion::{build_fine_exhaustion, certify_exhaustion, ExhaustionCertificate, ExhaustionSequence, FSigmaDomain};
use crate::geometry::Point;
use crate::par::{self, ExecMode};
use crate::potential::{Obstacle, PuncturedRegion};
use crate::runge::{
    classify_singularity, ln_sum_exp, synthesize, Evaluate, FitOptions, FitStrategy, PoleSite, SampleSet,
    SingularityClass, SingularityVerdict, StagePlan, SynthesizedFunction,
};

use super::config::Scenario;
use super::report::CertificateReport;
use super::ScenarioError;

/// Curve sampling step for `L_n`, in cells.
pub const L_STEP_CELLS: f64 = 1.0 / 8.0;
/// Boundary samples per exposed cell edge of `K_n`.
pub const K_SAMPLES_PER_EDGE: usize = 16;

/// `max_{K_n} |f_m - f_n|` bound for one pair `n < m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelescopingBound {
    pub n: usize,
    pub m: usize,
    pub ln_max: f64,
    pub holds: bool,
}

/// Continuation across one exceptional point.
#[derive(Debug, Clone, PartialEq)]
pub struct Continuation {
    pub verdict: SingularityVerdict,
    pub direct: Complex64,
    pub error: f64,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub scenario: Scenario,
    pub domain: FSigmaDomain,
    pub exhaustion: ExhaustionSequence,
    pub exhaustion_certificates: Vec<ExhaustionCertificate>,
    pub barriers: Vec<BarrierStage>,
    pub function: SynthesizedFunction,
    pub telescoping: Vec<TelescopingBound>,
    pub continuations: Vec<Continuation>,
    pub report: CertificateReport,
    /// Wall-clock seconds per phase; kept out of the report.
    pub timings: Vec<(String, f64)>,
}

pub fn barrier_seed(scenario_seed: u64, n: usize) -> u64 {
    scenario_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ n as u64
}

/// Exhaustion, barriers, synthesis and their certificates.
pub fn run_scenario(sc: &Scenario, mode: ExecMode) -> Result<RunOutput, ScenarioError> {
    sc.validate()?;
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut Vec<(String, f64)>| {
        timings.push((name.to_string(), clock.elapsed().as_secs_f64()));
        clock = Instant::now();
    };

    let domain = sc.domain()?.rasterize(sc.resolution, mode)?;
    let exhaustion = build_fine_exhaustion(&domain)?;
    let exhaustion_certificates = certify_exhaustion(&domain, &exhaustion)?;
    lap("exhaustion", &mut timings);

    let mut barriers = Vec::with_capacity(sc.stages);
    for n in 1..=sc.stages {
        barriers.push(assemble_barrier(&BarrierInputs {
            n,
            k_n: &exhaustion.stage(n),
            k_next: &exhaustion.stage(n + 1),
            f_n: domain.complement_compact(n),
            exceptional: &domain.exceptional_points,
            frame: domain.frame,
            wedge_trials: sc.wedge_trials,
            seed: barrier_seed(sc.seed, n),
            mode,
        })?);
    }
    lap("barrier", &mut timings);

    let step = L_STEP_CELLS * sc.resolution;
    let plans: Vec<StagePlan> = barriers
        .iter()
        .map(|b| StagePlan {
            k: exhaustion.stage(b.n).clone(),
            l: SampleSet::from_pieces(&b.pieces, step),
            pole_sites: b
                .holes
                .iter()
                .filter(|w| !w.exceptional)
                .map(|w| PoleSite { at: w.at, in_complement: domain.complement_compact(b.n).contains_point(w.at) })
                .collect(),
        })
        .collect();
    let opts = FitOptions { per_edge: K_SAMPLES_PER_EDGE, seed: sc.seed, mode };
    let function = synthesize(&plans, &opts)?;
    let telescoping = telescoping_bounds(&plans, &function, mode);
    lap("synthesis", &mut timings);

    let continuations = continuations(sc, &domain, &function);
    lap("removability", &mut timings);

    let mut out = RunOutput {
        scenario: sc.clone(),
        domain,
        exhaustion,
        exhaustion_certificates,
        barriers,
        function,
        telescoping,
        continuations,
        report: CertificateReport::default(),
        timings,
    };
    out.report = build_report(&out);
    Ok(out)
}

/// Certified `ln max_{K_n} sum_{n<j<=m} |R_j|` from boundary-sample balls;
/// `f_m - f_n` is holomorphic near `K_n`, so its maximum sits on the boundary.
fn telescoping_bounds(plans: &[StagePlan], f: &SynthesizedFunction, mode: ExecMode) -> Vec<TelescopingBound> {
    let mut out = Vec::new();
    for (idx, plan) in plans.iter().enumerate() {
        let n = idx + 1;
        let ks = SampleSet::from_mask_boundary(&plan.k, K_SAMPLES_PER_EDGE);
        let uppers: Vec<Vec<f64>> = f.stages[n..]
            .iter()
            .map(|r| par::map_slice(mode, &ks.points, |&z| r.ball_bounds(z, ks.radius).1))
            .collect();
        for m in n + 1..=f.len() {
            let ln_max = (0..ks.len())
                .map(|s| ln_sum_exp(uppers[..m - n].iter().map(|u| u[s])))
                .fold(f64::NEG_INFINITY, f64::max);
            out.push(TelescopingBound { n, m, ln_max, holds: ln_max < 0.5f64.powi(n as i32).ln() });
        }
    }
    out
}

/// Scans `f_N` about every exceptional point inside the largest disk that
/// keeps clear of the domain boundary, minus the other exceptional points.
fn continuations(sc: &Scenario, u: &FSigmaDomain, f: &SynthesizedFunction) -> Vec<Continuation> {
    let desc = sc.domain().expect("validated");
    u.exceptional_points
        .iter()
        .map(|&e| {
            let mut region = PuncturedRegion::disk(e, 0.9 * desc.depth(e));
            for &o in u.exceptional_points.iter().filter(|o| **o != e) {
                region = region.without(Obstacle::Point(o));
            }
            let direct = f.eval_log(e).map(|v| v.to_complex()).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            match classify_singularity(f, e, &region) {
                Ok(verdict) => {
                    let error = verdict.extension_value.map_or(f64::INFINITY, |v| (v - direct).norm());
                    let holds = verdict.class == SingularityClass::Removable && error < 1e-6 * (1.0 + direct.norm());
                    Continuation { verdict, direct, error, holds }
                }
                Err(_) => Continuation {
                    verdict: SingularityVerdict { at: e, class: SingularityClass::EssentialUnresolved, extension_value: None, evidence: vec![] },
                    direct,
                    error: f64::INFINITY,
                    holds: false,
                },
            }
        })
        .collect()
}

fn point(p: Point) -> String {
    format!("{:?} {:?}", p.x, p.y)
}

fn build_report(out: &RunOutput) -> CertificateReport {
    let sc = &out.scenario;
    let mut r = CertificateReport::default();
    let mut failures: Vec<String> = Vec::new();
    let s = r.section("scenario");
    s.put("name", &sc.name)
        .put("stages", sc.stages)
        .put_f64("resolution", sc.resolution)
        .put("seed", sc.seed)
        .put("wedge_trials", sc.wedge_trials)
        .put("blowup_trials", sc.blowup_trials)
        .put_f64("alpha", sc.alpha)
        .put("exceptional_points", sc.exceptional.len())
        .put("l_step_cells", L_STEP_CELLS)
        .put("k_samples_per_edge", K_SAMPLES_PER_EDGE);

    for c in &out.exhaustion_certificates {
        let pass = c.all_hold();
        if !pass {
            failures.push(format!("exhaustion.{}", c.n));
        }
        r.section(format!("exhaustion.{}", c.n))
            .put("cells", c.cells)
            .put_f64("interior_margin", c.interior_margin)
            .put("nested", c.nested)
            .put("covers_inner", c.covers_inner)
            .put("inside_domain", c.inside_domain)
            .put("bounded_holes", c.bounded_holes)
            .put("unwitnessed_holes", c.unwitnessed_holes)
            .put("open_punctures", c.open_punctures)
            .put("filled_components", c.filled_components)
            .put("pass", pass);
    }

    for b in &out.barriers {
        let c = &b.certificates;
        let deltas_ok = b.cuts.iter().all(|x| x.connectivity_delta == 1);
        let pass = c.all_hold() && deltas_ok;
        if !pass {
            failures.push(format!("barrier.{}", b.n));
        }
        r.section(format!("barrier.{}", b.n))
            .put_f64("epsilon_bound", b.delta_n)
            .put("covers", b.covers.len())
            .put("circles", b.covers.iter().map(|c| c.circles.len()).sum::<usize>())
            .put("arcs", b.arcs.len())
            .put("cuts", b.cuts.len())
            .put("cut_deltas_one", deltas_ok)
            .put_f64("min_cut_radius", b.cuts.iter().map(|c| c.cut_radius).fold(f64::INFINITY, f64::min))
            .put("pieces", b.pieces.len())
            .put("mask_cells", b.mask.count())
            .put_f64("nesting_margin", c.nesting_margin)
            .put("nesting", c.nesting)
            .put_f64("distance_to_stage", c.distance_to_stage)
            .put("separated", c.separated)
            .put("inside_next", c.inside_next)
            .put_debug("split_components", &c.split_components)
            .put("connected", c.connected)
            .put("holes", b.holes.len())
            .put("unwitnessed_holes", c.unwitnessed_holes)
            .put("holes_witnessed", c.holes_witnessed)
            .put("refine_factor", c.refine_factor)
            .put("wedge_seed", c.wedge_seed)
            .put("wedge_trials", c.wedge_trials)
            .put("wedge_hits", c.wedge_hits)
            .put("intercepts", c.intercepts)
            .put("pass", pass);
    }

    for (c, b) in out.function.certificates.iter().zip(&out.function.budgets) {
        let pass = c.all_hold();
        if !pass {
            failures.push(format!("synthesis.{}", c.n));
        }
        let s = r.section(format!("synthesis.{}", c.n));
        match &c.fit.strategy {
            FitStrategy::Zero => s.put("strategy", "zero"),
            FitStrategy::SinglePole { order } => s.put("strategy", "single-pole").put("order", order),
            FitStrategy::RootPower { roots_per_term, powers } => {
                s.put("strategy", "root-power").put("roots_per_term", roots_per_term).put_debug("powers", powers)
            }
        };
        s.put("poles", out.function.stages[c.n - 1].poles().len())
            .put_f64("ln_low", b.ln_low)
            .put_f64("ln_high", b.ln_high)
            .put_f64("ln_max_on_k", c.fit.ln_max_on_k)
            .put_f64("ln_min_on_l", c.fit.ln_min_on_l)
            .put_f64("low_margin", c.fit.ln_low - c.fit.ln_max_on_k)
            .put_f64("high_margin", c.fit.ln_min_on_l - c.fit.ln_high)
            .put("k_samples", c.fit.k_samples)
            .put("l_samples", c.fit.l_samples)
            .put_f64("ln_min_partial_on_l", c.ln_min_partial_on_l)
            .put_f64("ln_min_final_on_l", c.ln_min_final_on_l)
            .put("small_on_k", c.small_on_k)
            .put("large_on_l", c.large_on_l)
            .put("partial_exceeds_n", c.partial_exceeds_n)
            .put("tail_holds", c.tail_holds)
            .put("pass", pass);
    }

    let s = r.section("telescoping");
    for t in &out.telescoping {
        if !t.holds {
            failures.push(format!("telescoping.{}.{}", t.n, t.m));
        }
        s.put(&format!("{}.{}.ln_max", t.n, t.m), format!("{:?}", t.ln_max));
        s.put(&format!("{}.{}.pass", t.n, t.m), t.holds);
    }

    for (idx, c) in out.continuations.iter().enumerate() {
        if !c.holds {
            failures.push(format!("continuation.{}", idx + 1));
        }
        let class = match c.verdict.class {
            SingularityClass::Removable => "removable",
            SingularityClass::Pole => "pole",
            SingularityClass::EssentialUnresolved => "essential-unresolved",
        };
        let ext = c.verdict.extension_value.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        r.section(format!("continuation.{}", idx + 1))
            .put("at", point(c.verdict.at))
            .put("class", class)
            .put("scan_levels", c.verdict.evidence.len())
            .put("extension", format!("{:?} {:?}", ext.re, ext.im))
            .put("direct", format!("{:?} {:?}", c.direct.re, c.direct.im))
            .put_f64("error", c.error)
            .put("pass", c.holds);
    }

    r.section("verdict").put("pass", failures.is_empty()).put("failures", failures.join(" "));
    r
}

/// Report for a run that stopped with an error: no artifacts, failing verdict.
pub fn failure_report(sc: &Scenario, err: &ScenarioError) -> CertificateReport {
    let mut r = CertificateReport::default();
    r.section("scenario").put("name", &sc.name).put("stages", sc.stages).put_f64("resolution", sc.resolution).put("seed", sc.seed);
    r.section("error").put("message", err.to_string().replace('\n', " "));
    r.section("verdict").put("pass", false).put("failures", "error");
    r
}
