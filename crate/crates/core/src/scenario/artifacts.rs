//! Run directories: everything `certify` and `export` need, written once by
//! `run` and read back bit-exactly.
//!
//! Layout of `<dir>`:
//! - `<name>.report.txt`: the certificate report
//! - `scenario.cfg`: the effective scenario
//! - `function.txt`: `stage n` headers, each followed by a rational block
//! - `stages.txt`: frame, then per stage the `L_n` pieces in hex floats
//! - `k-<n>.fdgm`, `f-<n>.fdgm`: `K_n` and `F_n` as binary masks
//! - `timing.txt`: wall-clock seconds per phase, outside the report

use std::fmt::Write as _;
use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use crate::geometry::serial::{read_binary, write_binary};
use crate::geometry::{CircularArc, GridMask, IRect, Piece, Point};
use crate::hexfloat;
use crate::runge::RationalFunction;

use super::config::Scenario;
use super::report::CertificateReport;
use super::run::RunOutput;
use super::ScenarioError;

pub const FUNCTION_FILE: &str = "function.txt";
pub const STAGES_FILE: &str = "stages.txt";
pub const SCENARIO_FILE: &str = "scenario.cfg";
pub const TIMING_FILE: &str = "timing.txt";

pub fn report_file_name(name: &str) -> String {
    format!("{name}.report.txt")
}

/// A run read back from disk.
#[derive(Debug, Clone)]
pub struct StoredRun {
    pub dir: PathBuf,
    pub scenario: Scenario,
    pub report: CertificateReport,
    pub frame: IRect,
    /// `K_n` for `n = 1..=stages`.
    pub k: Vec<GridMask>,
    /// `F_n` for `n = 1..=stages`.
    pub f: Vec<GridMask>,
    /// `L_n` pieces for `n = 1..=stages`.
    pub l: Vec<Vec<Piece>>,
    /// `R_n` for `n = 1..=stages`.
    pub function: Vec<RationalFunction>,
}

fn artifact(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Artifact(msg.into())
}

fn write_mask(path: &Path, mask: &GridMask) -> Result<(), ScenarioError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_binary(mask, &mut w)?;
    std::io::Write::flush(&mut w)?;
    Ok(())
}

fn read_mask(path: &Path) -> Result<GridMask, ScenarioError> {
    let r = BufReader::new(fs::File::open(path)?);
    read_binary(r).map_err(|e| artifact(format!("{}: {e}", path.display())))
}

pub fn pieces_to_text(pieces: &[Piece]) -> String {
    let f = hexfloat::format;
    let mut s = String::new();
    for p in pieces {
        match p {
            Piece::Arc(a) => {
                let _ = writeln!(
                    s,
                    "arc {} {} {} {} {}",
                    f(a.center.x),
                    f(a.center.y),
                    f(a.radius),
                    f(a.theta_start),
                    f(a.theta_end)
                );
            }
            Piece::Polyline(pts) => {
                let _ = write!(s, "polyline {}", pts.len());
                for q in pts {
                    let _ = write!(s, " {} {}", f(q.x), f(q.y));
                }
                s.push('\n');
            }
        }
    }
    s
}

fn parse_piece(line: &str) -> Result<Piece, ScenarioError> {
    let mut it = line.split_whitespace();
    let tag = it.next();
    let nums: Vec<&str> = it.collect();
    let num = |t: &str| hexfloat::parse(t).ok_or_else(|| artifact(format!("bad float '{t}'")));
    match tag {
        Some("arc") if nums.len() == 5 => {
            let v = nums.iter().map(|t| num(t)).collect::<Result<Vec<f64>, _>>()?;
            // Stored fields are taken verbatim; `new` could re-normalize the span.
            Ok(Piece::Arc(CircularArc { center: Point::new(v[0], v[1]), radius: v[2], theta_start: v[3], theta_end: v[4] }))
        }
        Some("polyline") if !nums.is_empty() => {
            let n: usize = nums[0].parse().map_err(|_| artifact("bad polyline length"))?;
            if nums.len() != 1 + 2 * n {
                return Err(artifact("polyline length mismatch"));
            }
            let v = nums[1..].iter().map(|t| num(t)).collect::<Result<Vec<f64>, _>>()?;
            Ok(Piece::Polyline(v.chunks(2).map(|c| Point::new(c[0], c[1])).collect()))
        }
        _ => Err(artifact(format!("bad piece line '{line}'"))),
    }
}

/// Writes the run directory. Stage masks and pieces are written only for
/// the certified stages `1..=stages`.
pub fn write_run(dir: &Path, out: &RunOutput) -> Result<(), ScenarioError> {
    fs::create_dir_all(dir)?;
    let sc = &out.scenario;
    fs::write(dir.join(report_file_name(&sc.name)), out.report.to_text())?;
    fs::write(dir.join(SCENARIO_FILE), sc.to_text())?;

    let mut func = String::new();
    for (idx, r) in out.function.stages.iter().enumerate() {
        let _ = writeln!(func, "stage {}", idx + 1);
        func.push_str(&r.to_text());
    }
    fs::write(dir.join(FUNCTION_FILE), func)?;

    let fr = out.domain.frame;
    let mut stages = format!("frame {} {} {} {}\n", fr.i0, fr.j0, fr.i1, fr.j1);
    for b in &out.barriers {
        let _ = writeln!(stages, "stage {} {}", b.n, b.pieces.len());
        stages.push_str(&pieces_to_text(&b.pieces));
        write_mask(&dir.join(format!("k-{}.fdgm", b.n)), out.exhaustion.stage(b.n))?;
        write_mask(&dir.join(format!("f-{}.fdgm", b.n)), out.domain.complement_compact(b.n))?;
    }
    fs::write(dir.join(STAGES_FILE), stages)?;

    let mut timing = String::new();
    for (name, secs) in &out.timings {
        let _ = writeln!(timing, "{name} = {secs:.3}");
    }
    fs::write(dir.join(TIMING_FILE), timing)?;
    Ok(())
}

fn parse_functions(text: &str) -> Result<Vec<RationalFunction>, ScenarioError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty()).peekable();
    let mut out = Vec::new();
    while let Some(header) = lines.next() {
        let expected = format!("stage {}", out.len() + 1);
        if header != expected {
            return Err(artifact(format!("expected '{expected}', found '{header}'")));
        }
        out.push(RationalFunction::from_lines(&mut lines)?);
    }
    Ok(out)
}

pub fn read_run(dir: &Path) -> Result<StoredRun, ScenarioError> {
    let scenario = Scenario::parse(&fs::read_to_string(dir.join(SCENARIO_FILE))?)?;
    let report = CertificateReport::parse(&fs::read_to_string(dir.join(report_file_name(&scenario.name)))?)?;
    let function = parse_functions(&fs::read_to_string(dir.join(FUNCTION_FILE))?)?;

    let text = fs::read_to_string(dir.join(STAGES_FILE))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let frame_line = lines.next().ok_or_else(|| artifact("empty stages file"))?;
    let v: Vec<i64> = frame_line
        .strip_prefix("frame ")
        .ok_or_else(|| artifact("missing frame"))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| artifact("bad frame")))
        .collect::<Result<_, _>>()?;
    if v.len() != 4 {
        return Err(artifact("bad frame"));
    }
    let frame = IRect::new(v[0], v[1], v[2], v[3]);
    let (mut k, mut f, mut l) = (Vec::new(), Vec::new(), Vec::new());
    while let Some(header) = lines.next() {
        let parts: Vec<&str> = header.split_whitespace().collect();
        let n = l.len() + 1;
        if parts.len() != 3 || parts[0] != "stage" || parts[1] != n.to_string() {
            return Err(artifact(format!("expected stage {n} header, found '{header}'")));
        }
        let count: usize = parts[2].parse().map_err(|_| artifact("bad piece count"))?;
        let pieces = (0..count)
            .map(|_| lines.next().ok_or_else(|| artifact("truncated pieces")).and_then(parse_piece))
            .collect::<Result<Vec<_>, _>>()?;
        l.push(pieces);
        k.push(read_mask(&dir.join(format!("k-{n}.fdgm")))?);
        f.push(read_mask(&dir.join(format!("f-{n}.fdgm")))?);
    }
    if l.len() != function.len() {
        return Err(artifact(format!("{} barrier stages but {} rational stages", l.len(), function.len())));
    }
    Ok(StoredRun { dir: dir.to_path_buf(), scenario, report, frame, k, f, l, function })
}
