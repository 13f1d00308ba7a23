//! Field export: a log-scaled graymap of `|f|`, a hex-float CSV of the
//! complex field, and a report describing both.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::geometry::Point;
use crate::hexfloat;
use crate::par::{self, ExecMode};
use crate::runge::Evaluate;

use super::report::CertificateReport;
use super::ScenarioError;

pub const CSV_HEADER: &str = "x,y,re,im,ln_abs";

/// Axis-aligned region `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Region {
    /// Parses `x0,y0,x1,y1`.
    pub fn parse(s: &str) -> Result<Self, ScenarioError> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| ScenarioError::Config(format!("bad region coordinate '{t}'"))))
            .collect::<Result<_, _>>()?;
        if v.len() != 4 {
            return Err(ScenarioError::Config("region needs x0,y0,x1,y1".into()));
        }
        Ok(Region { x0: v[0], y0: v[1], x1: v[2], y1: v[3] })
    }

    pub fn is_empty(&self) -> bool {
        !(self.x1 > self.x0 && self.y1 > self.y0)
    }

    pub fn contains(&self, o: &Region) -> bool {
        o.x0 >= self.x0 && o.x1 <= self.x1 && o.y0 >= self.y0 && o.y1 <= self.y1
    }
}

/// One pixel-center sample; all fields NaN-free except at skipped poles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub re: f64,
    pub im: f64,
    pub ln_abs: f64,
}

/// `px x px` pixel-center samples, top row first.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub region: Region,
    pub px: usize,
    pub samples: Vec<FieldSample>,
}

impl Field {
    pub fn skipped(&self) -> usize {
        self.samples.iter().filter(|s| s.ln_abs.is_nan()).count()
    }

    /// `(min, max)` of the finite `ln|f|` values.
    pub fn ln_range(&self) -> Option<(f64, f64)> {
        let finite = self.samples.iter().map(|s| s.ln_abs).filter(|v| v.is_finite());
        finite.fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }
}

/// Evaluates `f` at pixel centers; points too close to a pole become NaN.
pub fn sample_field<E: Evaluate + ?Sized>(f: &E, region: Region, px: usize, mode: ExecMode) -> Result<Field, ScenarioError> {
    if region.is_empty() || px == 0 {
        return Err(ScenarioError::Config("empty export region".into()));
    }
    let dx = (region.x1 - region.x0) / px as f64;
    let dy = (region.y1 - region.y0) / px as f64;
    let samples = par::map_range(mode, px * px, |idx| {
        let (row, col) = (idx / px, idx % px);
        let x = region.x0 + (col as f64 + 0.5) * dx;
        let y = region.y1 - (row as f64 + 0.5) * dy;
        match f.eval_log(Point::new(x, y)) {
            Ok(v) => {
                let c = v.to_complex();
                FieldSample { x, y, re: c.re, im: c.im, ln_abs: v.ln_abs }
            }
            Err(_) => FieldSample { x, y, re: f64::NAN, im: f64::NAN, ln_abs: f64::NAN },
        }
    });
    Ok(Field { region, px, samples })
}

/// 8-bit binary graymap; gray level is affine in `ln|f|` over the recorded
/// range, skipped samples are black.
pub fn to_pgm(field: &Field) -> Vec<u8> {
    let (lo, hi) = field.ln_range().unwrap_or((0.0, 0.0));
    let span = hi - lo;
    let mut out = format!(
        "P5\n# ln_abs scale {} {}\n{} {}\n255\n",
        hexfloat::format(lo),
        hexfloat::format(hi),
        field.px,
        field.px
    )
    .into_bytes();
    out.extend(field.samples.iter().map(|s| {
        if s.ln_abs.is_nan() || s.ln_abs == f64::NEG_INFINITY {
            0
        } else if span <= 0.0 {
            255
        } else {
            (255.0 * (s.ln_abs - lo) / span).round().clamp(0.0, 255.0) as u8
        }
    }));
    out
}

pub fn to_csv(field: &Field) -> String {
    let f = hexfloat::format;
    let mut s = format!("{CSV_HEADER}\n");
    for p in &field.samples {
        let _ = writeln!(s, "{},{},{},{},{}", f(p.x), f(p.y), f(p.re), f(p.im), f(p.ln_abs));
    }
    s
}

pub fn read_csv(text: &str) -> Result<Vec<FieldSample>, ScenarioError> {
    let bad = |m: String| ScenarioError::Artifact(m);
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(bad(format!("csv does not start with '{CSV_HEADER}'")));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let v: Vec<f64> = l
                .split(',')
                .map(|t| hexfloat::parse(t).ok_or_else(|| bad(format!("bad csv value '{t}'"))))
                .collect::<Result<_, _>>()?;
            if v.len() != 5 {
                return Err(bad(format!("csv line '{l}' needs 5 values")));
            }
            Ok(FieldSample { x: v[0], y: v[1], re: v[2], im: v[3], ln_abs: v[4] })
        })
        .collect()
}

/// Files written by [`export_field`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExportFiles {
    pub pgm: PathBuf,
    pub csv: PathBuf,
    pub report: PathBuf,
    pub report_body: CertificateReport,
}

/// Writes `<stem>.pgm`, `<stem>.csv` and `<stem>.report.txt` into `dir`.
pub fn export_field<E: Evaluate + ?Sized>(
    f: &E,
    region: Region,
    px: usize,
    dir: &Path,
    stem: &str,
    mode: ExecMode,
) -> Result<ExportFiles, ScenarioError> {
    let field = sample_field(f, region, px, mode)?;
    let pgm = dir.join(format!("{stem}.pgm"));
    let csv = dir.join(format!("{stem}.csv"));
    let report = dir.join(format!("{stem}.report.txt"));
    let pgm_bytes = to_pgm(&field);
    let csv_text = to_csv(&field);
    fs::write(&pgm, &pgm_bytes)?;
    fs::write(&csv, &csv_text)?;
    let (lo, hi) = field.ln_range().unwrap_or((f64::NAN, f64::NAN));
    let mut r = CertificateReport::default();
    r.section("export")
        .put(
            "region",
            format!("{:?},{:?},{:?},{:?}", region.x0, region.y0, region.x1, region.y1),
        )
        .put("px", px)
        .put("samples", field.samples.len())
        .put("skipped_near_poles", field.skipped())
        .put_f64("ln_abs_min", lo)
        .put_f64("ln_abs_max", hi)
        .put("pgm", pgm.file_name().and_then(|s| s.to_str()).unwrap_or_default())
        .put("pgm_bytes", pgm_bytes.len())
        .put("csv", csv.file_name().and_then(|s| s.to_str()).unwrap_or_default())
        .put("csv_bytes", csv_text.len());
    r.section("verdict").put("pass", true).put("failures", "");
    fs::write(&report, r.to_text())?;
    Ok(ExportFiles { pgm, csv, report, report_body: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runge::RationalFunction;

    fn f() -> RationalFunction {
        RationalFunction::single_pole(Point::new(0.0, 0.0), 2, num_complex::Complex64::new(1.0, 0.5))
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let field = sample_field(&f(), Region { x0: -1.0, y0: -1.0, x1: 1.0, y1: 1.0 }, 9, ExecMode::Sequential).unwrap();
        let back = read_csv(&to_csv(&field)).unwrap();
        assert_eq!(back.len(), 81);
        for (a, b) in field.samples.iter().zip(&back) {
            for (u, v) in [(a.x, b.x), (a.y, b.y), (a.re, b.re), (a.im, b.im), (a.ln_abs, b.ln_abs)] {
                assert_eq!(u.to_bits(), v.to_bits());
            }
        }
    }

    #[test]
    fn pole_pixel_is_skipped_and_black() {
        // Odd px puts the central pixel exactly on the pole.
        let field = sample_field(&f(), Region { x0: -1.0, y0: -1.0, x1: 1.0, y1: 1.0 }, 3, ExecMode::Sequential).unwrap();
        assert_eq!(field.skipped(), 1);
        let pgm = to_pgm(&field);
        let body = &pgm[pgm.len() - 9..];
        assert_eq!(body[4], 0);
        // Edge midpoints sit closest to the pole and take the top gray level.
        assert_eq!(body[1], 255);
        assert_eq!(body[0], 0);
    }

    #[test]
    fn empty_region_is_rejected() {
        let r = Region { x0: 0.0, y0: 0.0, x1: 0.0, y1: 1.0 };
        assert!(sample_field(&f(), r, 8, ExecMode::Sequential).is_err());
        assert!(Region::parse("0,0,1").is_err());
    }
}
