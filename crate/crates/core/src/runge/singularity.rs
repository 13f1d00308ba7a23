use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::geometry::Point;
use crate::potential::{find_good_circle, FineRegion, CIRCLE_SAMPLES};

use super::logval::LogValue;
use super::synth::Evaluate;
use super::RungeError;

/// Ladder levels `k`: circles of radius in `[2^-k-1, 2^-k]`.
pub const SCAN_LEVELS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityClass {
    Removable,
    Pole,
    EssentialUnresolved,
}

/// `max |f|` and the mean of `f` on one certified circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRecord {
    pub level: u32,
    pub radius: f64,
    pub ln_max_abs: f64,
    pub mean: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityVerdict {
    pub at: Point,
    pub class: SingularityClass,
    pub extension_value: Option<Complex64>,
    pub evidence: Vec<ScanRecord>,
}

fn scan_circle<F: Evaluate + ?Sized>(f: &F, a: Point, t: f64, level: u32) -> ScanRecord {
    let n = CIRCLE_SAMPLES;
    let values: Vec<LogValue> = (0..n)
        .filter_map(|k| f.eval_log(a + Point::polar(t, 2.0 * PI * k as f64 / n as f64)).ok())
        .collect();
    let ln_max_abs = values.iter().map(|v| v.ln_abs).fold(f64::NEG_INFINITY, f64::max);
    let total = LogValue::sum(&values);
    let mean = LogValue { ln_abs: total.ln_abs - (values.len() as f64).ln(), phase: total.phase }.to_complex();
    ScanRecord { level, radius: t, ln_max_abs, mean }
}

/// Scans `|f|` on good circles about `a` inside `patch`.
///
/// Bounded scan values mean removable, with the mean over the smallest
/// circle as the extension value. Strictly increasing values gaining at
/// least `ln 2 / 2` per level mean a pole.
pub fn classify_singularity<F, R>(f: &F, a: Point, patch: &R) -> Result<SingularityVerdict, RungeError>
where
    F: Evaluate + ?Sized,
    R: FineRegion + ?Sized,
{
    let evidence: Vec<ScanRecord> = (1..=SCAN_LEVELS)
        .filter_map(|k| find_good_circle(patch, a, 2.0, k, None).ok().map(|t| scan_circle(f, a, t, k)))
        .collect();
    if evidence.len() < 2 {
        return Err(RungeError::ScanFailed { at: a });
    }
    let m: Vec<f64> = evidence.iter().map(|r| r.ln_max_abs).collect();
    let span = (evidence[evidence.len() - 1].level - evidence[0].level) as f64;
    let increasing = m.windows(2).all(|w| w[1] > w[0]);
    let first_half = m[..m.len().div_ceil(2)].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let last = m[m.len() - 1];
    let class = if increasing && last - m[0] >= 0.5 * LN_2 * span {
        SingularityClass::Pole
    } else if last.is_finite() && last <= first_half + LN_2 {
        SingularityClass::Removable
    } else {
        SingularityClass::EssentialUnresolved
    };
    let extension_value = (class == SingularityClass::Removable).then(|| evidence[evidence.len() - 1].mean);
    Ok(SingularityVerdict { at: a, class, extension_value, evidence })
}
