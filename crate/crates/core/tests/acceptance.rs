//! One PASS/FAIL line per acceptance criterion. Scenario runs are shared and
//! executed one after another, so the recorded phase timings are honest.

use std::f64::consts::{LN_2, PI, TAU};
use std::process::ExitCode;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use finedomain::barrier::{arc_cut, rasterize_pieces};
use finedomain::geometry::{complement_components, wedge_hits, CircularArc, Grid, GridMask, HitTarget, Piece, Point, Wedge};
use finedomain::par::ExecMode;
use finedomain::potential::{equilibrium_measure, radial_occupancy_integral, Plane};
use finedomain::runge::{classify_singularity, PartialSum, RationalFunction, SingularityClass, Term};
use finedomain::scenario::{
    certify_blowup_mechanics, read_run, run_scenario, write_run, BlowupInputs, BlowupOptions, RunOutput, Scenario,
};

const SCENARIOS: [&str; 4] = ["unit-disc", "punctured-disc", "two-discs", "rationals-truncated"];

struct Runs {
    out: Vec<(&'static str, Result<RunOutput, String>)>,
}

impl Runs {
    fn get(&self, name: &str) -> Result<&RunOutput, String> {
        let (_, r) = self.out.iter().find(|(n, _)| *n == name).expect("known scenario");
        r.as_ref().map_err(|e| format!("{name}: {e}"))
    }
}

fn timing(out: &RunOutput, phase: &str) -> Option<f64> {
    out.timings.iter().find(|(p, _)| p == phase).map(|(_, s)| *s)
}

/// A note on success, the first failure otherwise.
type Check = Result<String, String>;

fn criterion_1(runs: &Runs) -> Check {
    let mut notes = Vec::new();
    for name in ["unit-disc", "punctured-disc", "two-discs"] {
        let out = runs.get(name)?;
        if out.exhaustion_certificates.is_empty() {
            return Err(format!("{name}: no exhaustion certificates"));
        }
        for c in &out.exhaustion_certificates {
            if !(c.all_hold() && c.special()) {
                return Err(format!("{name}: stage {} certificate fails: {c:?}", c.n));
            }
        }
        let t = timing(out, "exhaustion").ok_or(format!("{name}: no exhaustion timing"))?;
        if t >= 30.0 {
            return Err(format!("{name}: exhaustion took {t:.1} s"));
        }
        notes.push(format!("{name} {} stages {t:.1} s", out.exhaustion_certificates.len()));
    }
    Ok(notes.join(", "))
}

fn criterion_2(runs: &Runs) -> Check {
    let mut notes = Vec::new();
    for name in SCENARIOS {
        let out = runs.get(name)?;
        for b in &out.barriers {
            let c = &b.certificates;
            if !c.all_hold() {
                return Err(format!("{name}: barrier {} fails: {c:?}", b.n));
            }
            if c.wedge_trials != out.scenario.wedge_trials || c.wedge_hits != c.wedge_trials {
                return Err(format!("{name}: barrier {} hits {}/{}", b.n, c.wedge_hits, c.wedge_trials));
            }
            if let Some(cut) = b.cuts.iter().find(|c| c.connectivity_delta != 1) {
                return Err(format!("{name}: cut at {:?} has delta {}", cut.cut_point, cut.connectivity_delta));
            }
        }
        let t = timing(out, "barrier").ok_or(format!("{name}: no barrier timing"))?;
        if t >= 60.0 {
            return Err(format!("{name}: barrier took {t:.1} s"));
        }
        notes.push(format!("{name} {t:.1} s"));
    }
    Ok(notes.join(", "))
}

fn components_of(pieces: &[Piece], grid: Grid, bounds: (f64, f64, f64, f64)) -> Result<usize, String> {
    let mask = rasterize_pieces(pieces, grid);
    let frame = grid.rect_covering(bounds.0, bounds.1, bounds.2, bounds.3);
    complement_components(&mask, frame).map(|l| l.component_count()).map_err(|e| e.to_string())
}

/// Random circles and chord-closed arcs, cut once each. The raster oracle
/// counts complementary components at `h = r / 32`.
fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut wedges = 0usize;
    for case in 0..100 {
        let center = Point::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let rad = rng.gen_range(0.3..0.8);
        let full = case < 50;
        let arc = if full {
            CircularArc::full_circle(center, rad)
        } else {
            let t0 = rng.gen_range(0.0..TAU);
            CircularArc::new(center, rad, t0, t0 + rng.gen_range(0.5 * PI..1.5 * PI)).map_err(|e| e.to_string())?
        };
        let a = arc.point_at_angle(arc.theta_start + arc.span() * rng.gen_range(0.25..0.75));
        let r = rad * rng.gen_range(0.05..0.12);
        let cut = arc_cut(&arc, a, r, &Plane).map_err(|e| format!("case {case}: {e}"))?;
        let chord: Vec<Piece> = if full { vec![] } else { vec![Piece::Polyline(vec![arc.end(), arc.start()])] };

        let grid = Grid::new(Point::ORIGIN, r / 32.0);
        let m = rad + 4.0 * r;
        let bounds = (center.x - m, center.y - m, center.x + m, center.y + m);
        let before: Vec<Piece> = std::iter::once(Piece::Arc(arc)).chain(chord.iter().cloned()).collect();
        let after: Vec<Piece> = cut.pieces.iter().cloned().chain(chord.iter().cloned()).collect();
        let (c0, c1) = (components_of(&before, grid, bounds)?, components_of(&after, grid, bounds)?);
        if c0 != c1 + 1 || (c0 - c1) as u32 != cut.connectivity_delta {
            return Err(format!("case {case}: components {c0} -> {c1}, reported delta {}", cut.connectivity_delta));
        }

        let outside = |p: Point| p.dist(a) > r * (1.0 + 1e-9);
        let on = |p: Point, pieces: &[Piece]| pieces.iter().any(|q| q.dist_to_point(p) < 1e-9);
        if let Some(p) = arc.sample(r / 64.0).into_iter().find(|p| outside(*p) && !on(*p, &cut.pieces)) {
            return Err(format!("case {case}: original point {p:?} lost"));
        }
        for piece in &cut.pieces {
            if let Some(p) = piece.sample(r / 64.0).into_iter().find(|p| outside(*p) && arc.dist_to_point(*p) >= 1e-9) {
                return Err(format!("case {case}: new point {p:?} outside the ball"));
            }
        }

        let original = [Piece::Arc(arc)];
        let mut met = 0;
        let mut drawn = 0;
        while met < 10_000 {
            drawn += 1;
            if drawn > 1_000_000 {
                return Err(format!("case {case}: only {met} qualifying wedges"));
            }
            let b = a + Point::polar(2.0 * r * rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..TAU));
            let leg = rng.gen_range(2.0 * r * (1.0 + 1e-9)..5.0 * r);
            let w = Wedge {
                p: b + Point::polar(leg, rng.gen_range(0.0..TAU)),
                apex: b,
                q: b + Point::polar(leg, rng.gen_range(0.0..TAU)),
            };
            if !wedge_hits(&w, HitTarget::Pieces(&original)) {
                continue;
            }
            met += 1;
            if !wedge_hits(&w, HitTarget::Pieces(&cut.pieces)) {
                return Err(format!("case {case}: wedge {w:?} slips through"));
            }
        }
        wedges += met;
    }
    Ok(format!("100 curves, {wedges} intercepted wedges"))
}

fn criterion_4(runs: &Runs) -> Check {
    let mut stages = 0;
    for name in SCENARIOS {
        let out = runs.get(name)?;
        for c in out.function.certificates.iter().filter(|c| c.n <= 5) {
            let f = &c.fit;
            let margins = (f.ln_low - f.ln_max_on_k, f.ln_min_on_l - f.ln_high);
            if !(c.small_on_k && c.large_on_l && margins.0 > 0.0 && margins.1 > 0.0) {
                return Err(format!("{name}: stage {} margins {margins:?}", c.n));
            }
            stages += 1;
        }
    }
    // (z - 4)^-3: |R| peaks at z = 1 on the unit disc and bottoms out at
    // |z - 4| = 3/4 on the ring around 4.
    let cube = RationalFunction::single_pole(Point::new(4.0, 0.0), 3, Complex64::new(1.0, 0.0));
    let on_k = cube.eval(Point::new(1.0, 0.0)).map_err(|e| e.to_string())?.norm();
    let on_l = cube.eval(Point::new(4.75, 0.0)).map_err(|e| e.to_string())?.norm();
    let k_max = (0..720)
        .map(|k| cube.eval(Point::polar(1.0, TAU * k as f64 / 720.0)).map_or(f64::INFINITY, |v| v.norm()))
        .fold(0.0, f64::max);
    if (on_k - 1.0 / 27.0).abs() > 1e-12 || (on_l - (4.0f64 / 3.0).powi(3)).abs() > 1e-12 || k_max > 1.0 / 27.0 + 1e-12 {
        return Err(format!("closed form: {on_k} vs 1/27, {on_l} vs 64/27"));
    }
    if !(on_k < 0.25 && on_l > 2.0) {
        return Err("closed form misses the levels 1/4 and 2".into());
    }
    Ok(format!("{stages} stage fits, closed form 1/27 and 64/27"))
}

fn criterion_5(runs: &Runs) -> Check {
    let mut pairs = 0;
    for name in SCENARIOS {
        let out = runs.get(name)?;
        let n_stages = out.function.len();
        let want = n_stages * (n_stages - 1) / 2;
        if out.telescoping.len() != want {
            return Err(format!("{name}: {} telescoping bounds, want {want}", out.telescoping.len()));
        }
        if let Some(t) = out.telescoping.iter().find(|t| !t.holds || !(t.ln_max < 0.5f64.powi(t.n as i32).ln())) {
            return Err(format!("{name}: telescoping {} -> {} has ln max {}", t.n, t.m, t.ln_max));
        }
        for c in &out.function.certificates {
            let floor = c.n as f64 - 0.5f64.powi(c.n as i32);
            if !(c.tail_holds && c.ln_min_final_on_l > floor.ln()) {
                return Err(format!("{name}: stage {} tail {} vs ln {floor}", c.n, c.ln_min_final_on_l));
            }
        }
        pairs += want;
    }
    let punct = runs.get("punctured-disc")?.function.len();
    if punct < 5 {
        return Err(format!("punctured-disc has only {punct} stages"));
    }
    Ok(format!("{pairs} telescoping pairs, punctured-disc {punct} stages"))
}

fn criterion_6(runs: &Runs) -> Check {
    let out = runs.get("unit-disc")?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_run(dir.path(), out).map_err(|e| e.to_string())?;
    let st = read_run(dir.path()).map_err(|e| e.to_string())?;
    let f = PartialSum { terms: &st.function };
    let inputs = BlowupInputs { k: &st.k, f: &st.f, l: &st.l };
    let mut worst = f64::INFINITY;
    for seed in 0..10 {
        let opts = BlowupOptions { bound: 2.0, trials: 1000, alpha: st.scenario.alpha, seed, mode: ExecMode::Parallel };
        let rec = certify_blowup_mechanics(&inputs, &f, &opts).map_err(|e| e.to_string())?;
        if !rec.holds(1000) {
            return Err(format!("seed {seed}: {rec:?}"));
        }
        worst = worst.min(rec.ln_min_abs);
    }
    Ok(format!("10 seeds x 1000 wedges, min ln|f| at hits {worst:.1}"))
}

fn criterion_7() -> Check {
    let g = |h: f64| Grid::new(Point::ORIGIN, h);
    let h = 1.0 / 1024.0;
    let r = 0.5;
    let ring = GridMask::from_centers(g(h), g(h).rect_covering(-0.6, -0.6, 0.6, 0.6), ExecMode::Parallel, |p| {
        (p.norm() - r).abs() <= 0.5 * h
    });
    let cap = equilibrium_measure(&ring, 256, 7).map_err(|e| e.to_string())?.capacity;
    if (cap / r - 1.0).abs() >= 0.01 {
        return Err(format!("circle capacity {cap} vs {r}"));
    }
    let seg = GridMask::from_fn(g(h), g(h).rect_covering(-0.5, 0.0, 0.5 - h, 0.0), ExecMode::Sequential, |_, _| true);
    let len = seg.count() as f64 * h;
    let seg_cap = equilibrium_measure(&seg, 512, 1).map_err(|e| e.to_string())?.capacity;
    if (seg_cap / (len / 4.0) - 1.0).abs() >= 0.02 {
        return Err(format!("segment capacity {seg_cap} vs {}", len / 4.0));
    }
    let h = 1.0 / 256.0;
    let half_diag = 0.5 * h * 2f64.sqrt();
    let annulus = GridMask::from_centers(g(h), g(h).rect_covering(-1.0, -1.0, 1.0, 1.0), ExecMode::Parallel, |p| {
        let t = p.norm();
        t - half_diag >= 0.25 && t + half_diag <= 0.5
    });
    let occ = radial_occupancy_integral(&annulus, Point::ORIGIN, 1.0).integral;
    if (occ - LN_2).abs() > 2.0 * h {
        return Err(format!("annulus occupancy {occ} vs ln 2"));
    }
    Ok(format!("circle {cap:.5}, segment {seg_cap:.5}, annulus {occ:.5}"))
}

/// Poles at distance at least 2 from the probe, so every scan circle sees
/// an analytic function.
fn random_far_part(rng: &mut ChaCha8Rng, probe: Point) -> Vec<Term> {
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let pole = probe + Point::polar(rng.gen_range(2.0..3.0), rng.gen_range(0.0..TAU));
        let coefficients = (0..rng.gen_range(1..=3))
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        terms.push(Term::Poles { pole, coefficients });
    }
    let poly = (0..rng.gen_range(1..=3)).map(|_| Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))).collect();
    terms.push(Term::Polynomial(poly));
    terms
}

fn criterion_8(runs: &Runs) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let probe = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let f = RationalFunction { terms: random_far_part(&mut rng, probe), pole_attestations: Vec::new() };
        let v = classify_singularity(&f, probe, &Plane).map_err(|e| format!("analytic {case}: {e}"))?;
        let direct = f.eval(probe).map_err(|e| e.to_string())?;
        let err = v.extension_value.map_or(f64::INFINITY, |e| (e - direct).norm());
        if v.class != SingularityClass::Removable || !(err < 1e-6) {
            return Err(format!("analytic {case}: {:?} error {err}", v.class));
        }
        worst = worst.max(err);
    }
    for case in 0..100 {
        let probe = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let mut terms = random_far_part(&mut rng, probe);
        let c = Complex64::from_polar(rng.gen_range(1.0..2.0), rng.gen_range(0.0..TAU));
        let mut principal = RationalFunction::single_pole(probe, rng.gen_range(1..=3), c);
        terms.append(&mut principal.terms);
        let f = RationalFunction { terms, pole_attestations: Vec::new() };
        let v = classify_singularity(&f, probe, &Plane).map_err(|e| format!("pole {case}: {e}"))?;
        if v.class != SingularityClass::Pole {
            return Err(format!("pole {case}: classified {:?}", v.class));
        }
    }
    let out = runs.get("rationals-truncated")?;
    if out.continuations.is_empty() {
        return Err("rationals-truncated has no continuations".into());
    }
    if let Some(c) = out.continuations.iter().find(|c| !c.holds) {
        return Err(format!("continuation at {:?}: {:?} error {}", c.verdict.at, c.verdict.class, c.error));
    }
    Ok(format!("max removable error {worst:.2e}, {} continuations", out.continuations.len()))
}

fn criterion_9(runs: &Runs) -> Check {
    let first = runs.get("unit-disc")?;
    let sc = Scenario::named("unit-disc").map_err(|e| e.to_string())?;
    let again = run_scenario(&sc, ExecMode::Sequential).map_err(|e| e.to_string())?;
    let (a, b) = (first.report.to_text(), again.report.to_text());
    if a != b {
        let line = a.lines().zip(b.lines()).find(|(x, y)| x != y);
        return Err(format!("reports differ at {line:?}"));
    }
    Ok(format!("{} report bytes identical across modes", a.len()))
}

fn main() -> ExitCode {
    let out = SCENARIOS
        .iter()
        .map(|&name| {
            let r = Scenario::named(name).and_then(|sc| run_scenario(&sc, ExecMode::Parallel)).map_err(|e| e.to_string());
            (name, r)
        })
        .collect();
    let runs = Runs { out };

    let checks: [(&str, Box<dyn Fn() -> Check + '_>); 9] = [
        ("special exhaustions", Box::new(|| criterion_1(&runs))),
        ("barrier certificates", Box::new(|| criterion_2(&runs))),
        ("arc cut connectivity, identity and interception", Box::new(criterion_3)),
        ("two-level rational fits", Box::new(|| criterion_4(&runs))),
        ("telescoping and tail bounds", Box::new(|| criterion_5(&runs))),
        ("blow-up mechanics", Box::new(|| criterion_6(&runs))),
        ("capacity and occupancy oracles", Box::new(criterion_7)),
        ("removability classification", Box::new(|| criterion_8(&runs))),
        ("deterministic reports", Box::new(|| criterion_9(&runs))),
    ];
    let mut failed = 0;
    for (k, (title, check)) in checks.iter().enumerate() {
        match check() {
            Ok(note) => println!("PASS criterion {}: {title} ({note})", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {title}: {why}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
