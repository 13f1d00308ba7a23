use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::geometry::Point;
use crate::hexfloat;

use super::logval::{ln_diff_exp, ln_sum_exp, LogValue};
use super::RungeError;

/// Distance below which a point counts as sitting on a pole.
pub const POLE_TOLERANCE: f64 = 1e-9;

/// One additive summand of a rational function.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    /// `sum_m c_m (z - pole)^-(m + 1)`.
    Poles { pole: Point, coefficients: Vec<Complex64> },
    /// `sum_j a_j z^j`.
    Polynomial(Vec<Complex64>),
    /// `exp(ln_scale + i phase) * (prod_i (z - root_i) / (z - pole)^N)^power`
    /// with `N` the number of roots; without a pole this is a polynomial of
    /// degree `N * power`. Kept factored: expanded coefficients of such
    /// degrees are numerically meaningless.
    RootPower { roots: Vec<Point>, pole: Option<Point>, power: u32, ln_scale: f64, phase: f64 },
}

pub(crate) fn ln_dist_bounds(d: f64, rho: f64) -> (f64, f64) {
    ((d - rho).max(0.0).ln(), (d + rho).ln())
}

/// Product of non-negative reals kept as `mantissa * e^ln`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledProduct {
    ln: f64,
    m: f64,
}

impl ScaledProduct {
    pub(crate) fn new() -> Self {
        ScaledProduct { ln: 0.0, m: 1.0 }
    }

    pub(crate) fn mul(&mut self, x: f64) {
        self.m *= x;
        if !(1e-150..=1e150).contains(&self.m) && self.m != 0.0 {
            self.ln += self.m.ln();
            self.m = 1.0;
        }
    }

    pub(crate) fn ln(&self) -> f64 {
        self.ln + self.m.ln()
    }
}

impl Term {
    pub fn pole(&self) -> Option<(Point, u64)> {
        match self {
            Term::Poles { pole, coefficients } => Some((*pole, coefficients.len() as u64)),
            Term::Polynomial(_) => None,
            Term::RootPower { roots, pole, power, .. } => pole.map(|p| (p, roots.len() as u64 * *power as u64)),
        }
    }

    fn eval_log(&self, z: Point) -> LogValue {
        match self {
            Term::Poles { pole, coefficients } => {
                let w = LogValue::from_complex(Complex64::new(1.0, 0.0) / (z - *pole).to_complex());
                let parts: Vec<LogValue> = coefficients
                    .iter()
                    .enumerate()
                    .map(|(m, c)| {
                        let c = LogValue::from_complex(*c);
                        let e = (m + 1) as f64;
                        LogValue { ln_abs: c.ln_abs + e * w.ln_abs, phase: c.phase + e * w.phase }
                    })
                    .collect();
                LogValue::sum(&parts)
            }
            Term::Polynomial(a) => {
                let zc = z.to_complex();
                LogValue::from_complex(a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * zc + c))
            }
            Term::RootPower { roots, pole, power, ln_scale, phase } => {
                // Running product, rescaled before it can leave the f64 range.
                let (mut ln, mut acc) = (0.0, Complex64::new(1.0, 0.0));
                for r in roots {
                    acc *= (z - *r).to_complex();
                    let m = acc.norm();
                    if !(1e-150..=1e150).contains(&m) {
                        if m == 0.0 {
                            return LogValue::ZERO;
                        }
                        ln += m.ln();
                        acc /= m;
                    }
                }
                ln += acc.norm().ln();
                let mut arg = acc.arg();
                if let Some(p) = pole {
                    let d = z - *p;
                    ln -= roots.len() as f64 * d.norm().ln();
                    arg -= (roots.len() as f64 * d.angle()).rem_euclid(TAU);
                }
                let k = *power as f64;
                LogValue { ln_abs: ln_scale + k * ln, phase: (phase + k * arg.rem_euclid(TAU)).rem_euclid(TAU) }
            }
        }
    }

    /// Lower and upper bounds of `ln|term|` over the closed ball `B(z, rho)`.
    fn ball_bounds(&self, z: Point, rho: f64) -> (f64, f64) {
        match self {
            Term::Poles { pole, coefficients } => {
                let d = z.dist(*pole);
                let (lo_d, hi_d) = ln_dist_bounds(d, rho);
                let upper = ln_sum_exp(coefficients.iter().enumerate().map(|(m, c)| c.norm().ln() - (m + 1) as f64 * lo_d));
                let nonzero: Vec<(usize, &Complex64)> = coefficients.iter().enumerate().filter(|(_, c)| c.norm() > 0.0).collect();
                let lower = if nonzero.len() == 1 {
                    let (m, c) = nonzero[0];
                    c.norm().ln() - (m + 1) as f64 * hi_d
                } else {
                    // |v(z)| minus rho times the derivative bound on the ball
                    let slope = ln_sum_exp(
                        coefficients
                            .iter()
                            .enumerate()
                            .map(|(m, c)| c.norm().ln() + ((m + 1) as f64).ln() - (m + 2) as f64 * lo_d),
                    );
                    ln_diff_exp(self.eval_log(z).ln_abs, rho.ln() + slope)
                };
                (lower, upper)
            }
            Term::Polynomial(a) => {
                let v = self.eval_log(z).ln_abs;
                let r = z.norm() + rho;
                let slope = ln_sum_exp(a.iter().enumerate().skip(1).map(|(j, c)| c.norm().ln() + (j as f64).ln() + (j - 1) as f64 * r.ln()));
                let spread = rho.ln() + slope;
                (ln_diff_exp(v, spread), ln_sum_exp([v, spread]))
            }
            Term::RootPower { roots, pole, power, ln_scale, .. } => {
                let (mut lo, mut hi) = (ScaledProduct::new(), ScaledProduct::new());
                for r in roots {
                    let d = z.dist(*r);
                    lo.mul((d - rho).max(0.0));
                    hi.mul(d + rho);
                }
                let (mut lo, mut hi) = (lo.ln(), hi.ln());
                if let Some(p) = pole {
                    let (a, b) = ln_dist_bounds(z.dist(*p), rho);
                    let n = roots.len() as f64;
                    lo -= n * b;
                    hi -= n * a;
                }
                let k = *power as f64;
                (ln_scale + k * lo, ln_scale + k * hi)
            }
        }
    }
}

/// Whether a pole was checked to lie off the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleAttestation {
    pub pole: Point,
    pub in_complement: bool,
}

/// Finite sum of [`Term`]s.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RationalFunction {
    pub terms: Vec<Term>,
    pub pole_attestations: Vec<PoleAttestation>,
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction::default()
    }

    pub fn single_pole(pole: Point, order: usize, coefficient: Complex64) -> Self {
        let mut coefficients = vec![Complex64::new(0.0, 0.0); order];
        coefficients[order - 1] = coefficient;
        RationalFunction { terms: vec![Term::Poles { pole, coefficients }], pole_attestations: Vec::new() }
    }

    /// Poles with their maximal orders.
    pub fn poles(&self) -> Vec<(Point, u64)> {
        self.terms.iter().filter_map(Term::pole).collect()
    }

    pub fn check_off_poles(&self, z: Point) -> Result<(), RungeError> {
        match self.poles().iter().find(|(p, _)| z.dist(*p) <= POLE_TOLERANCE) {
            Some(_) => Err(RungeError::PoleProximity { at: z }),
            None => Ok(()),
        }
    }

    pub fn eval_log(&self, z: Point) -> Result<LogValue, RungeError> {
        self.check_off_poles(z)?;
        Ok(self.eval_log_unchecked(z))
    }

    pub(crate) fn eval_log_unchecked(&self, z: Point) -> LogValue {
        let parts: Vec<LogValue> = self.terms.iter().map(|t| t.eval_log(z)).collect();
        LogValue::sum(&parts)
    }

    pub fn eval(&self, z: Point) -> Result<Complex64, RungeError> {
        Ok(self.eval_log(z)?.to_complex())
    }

    /// Certified lower and upper bounds of `ln|R|` over `B(z, rho)`.
    pub fn ball_bounds(&self, z: Point, rho: f64) -> (f64, f64) {
        let b: Vec<(f64, f64)> = self.terms.iter().map(|t| t.ball_bounds(z, rho)).collect();
        let upper = ln_sum_exp(b.iter().map(|x| x.1));
        let lower = (0..b.len())
            .map(|t| {
                let rest = ln_sum_exp(b.iter().enumerate().filter(|(s, _)| *s != t).map(|(_, x)| x.1));
                ln_diff_exp(b[t].0, rest)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        (lower, upper)
    }

    /// Plain-text form; every float is a hex literal.
    pub fn to_text(&self) -> String {
        let f = hexfloat::format;
        let mut s = String::from("rational\n");
        for a in &self.pole_attestations {
            let _ = writeln!(s, "attest {} {} {}", f(a.pole.x), f(a.pole.y), a.in_complement as u8);
        }
        for t in &self.terms {
            match t {
                Term::Poles { pole, coefficients } => {
                    let _ = writeln!(s, "poles {} {} {}", f(pole.x), f(pole.y), coefficients.len());
                    for c in coefficients {
                        let _ = writeln!(s, "coef {} {}", f(c.re), f(c.im));
                    }
                }
                Term::Polynomial(a) => {
                    let _ = writeln!(s, "polynomial {}", a.len());
                    for c in a {
                        let _ = writeln!(s, "coef {} {}", f(c.re), f(c.im));
                    }
                }
                Term::RootPower { roots, pole, power, ln_scale, phase } => {
                    let pole = match pole {
                        Some(p) => format!("{} {}", f(p.x), f(p.y)),
                        None => "none".into(),
                    };
                    let _ = writeln!(s, "rootpower {pole} {power} {} {} {}", f(*ln_scale), f(*phase), roots.len());
                    for r in roots {
                        let _ = writeln!(s, "root {} {}", f(r.x), f(r.y));
                    }
                }
            }
        }
        s.push_str("end\n");
        s
    }

    /// Reads one block written by [`to_text`](Self::to_text) from `lines`.
    pub fn from_lines<'a>(lines: &mut impl Iterator<Item = &'a str>) -> Result<Self, RungeError> {
        let bad = |m: &str| RungeError::Parse(m.to_string());
        let num = |t: Option<&str>| t.and_then(hexfloat::parse).ok_or_else(|| bad("expected a float"));
        let int = |t: Option<&str>| t.and_then(|x| x.parse::<usize>().ok()).ok_or_else(|| bad("expected an integer"));
        let mut next = || lines.next().map(str::trim).ok_or_else(|| bad("unexpected end of input"));
        let pairs = |n: usize, tag: &str, next: &mut dyn FnMut() -> Result<&'a str, RungeError>| {
            (0..n)
                .map(|_| {
                    let line = next()?;
                    let mut it = line.split_whitespace();
                    if it.next() != Some(tag) {
                        return Err(bad(&format!("expected '{tag}'")));
                    }
                    Ok((num(it.next())?, num(it.next())?))
                })
                .collect::<Result<Vec<(f64, f64)>, RungeError>>()
        };
        if next()? != "rational" {
            return Err(bad("expected 'rational'"));
        }
        let mut r = RationalFunction::zero();
        loop {
            let line = next()?;
            let mut it = line.split_whitespace();
            match it.next() {
                Some("end") => return Ok(r),
                Some("attest") => {
                    let pole = Point::new(num(it.next())?, num(it.next())?);
                    r.pole_attestations.push(PoleAttestation { pole, in_complement: int(it.next())? == 1 });
                }
                Some("poles") => {
                    let pole = Point::new(num(it.next())?, num(it.next())?);
                    let n = int(it.next())?;
                    let c = pairs(n, "coef", &mut next)?;
                    r.terms.push(Term::Poles { pole, coefficients: c.into_iter().map(|(a, b)| Complex64::new(a, b)).collect() });
                }
                Some("polynomial") => {
                    let n = int(it.next())?;
                    let c = pairs(n, "coef", &mut next)?;
                    r.terms.push(Term::Polynomial(c.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()));
                }
                Some("rootpower") => {
                    let first = it.next();
                    let pole = if first == Some("none") { None } else { Some(Point::new(num(first)?, num(it.next())?)) };
                    let power = int(it.next())? as u32;
                    let ln_scale = num(it.next())?;
                    let phase = num(it.next())?;
                    let n = int(it.next())?;
                    let roots = pairs(n, "root", &mut next)?.into_iter().map(|(x, y)| Point::new(x, y)).collect();
                    r.terms.push(Term::RootPower { roots, pole, power, ln_scale, phase });
                }
                _ => return Err(bad(&format!("unknown line '{line}'"))),
            }
        }
    }

    pub fn from_text(text: &str) -> Result<Self, RungeError> {
        Self::from_lines(&mut text.lines().filter(|l| !l.trim().is_empty()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn simple_pole_value() {
        let r = RationalFunction::single_pole(Point::new(4.0, 0.0), 1, c(1.0, 0.0));
        assert!((r.eval(Point::ORIGIN).unwrap() - c(-0.25, 0.0)).norm() < 1e-15);
        assert!(matches!(r.eval(Point::new(4.0, 0.0)), Err(RungeError::PoleProximity { .. })));
        assert_eq!(r.poles(), vec![(Point::new(4.0, 0.0), 1)]);
    }

    #[test]
    fn root_power_matches_direct_product() {
        let roots = vec![Point::new(0.5, 0.0), Point::new(-0.2, 0.3), Point::new(0.1, -0.4)];
        let p = Point::new(2.0, 1.0);
        let t = Term::RootPower { roots: roots.clone(), pole: Some(p), power: 3, ln_scale: 0.7, phase: 0.4 };
        let r = RationalFunction { terms: vec![t], pole_attestations: vec![] };
        let z = Point::new(0.3, 0.9);
        let zc = z.to_complex();
        let q: Complex64 = roots.iter().map(|w| zc - w.to_complex()).product::<Complex64>() / (zc - p.to_complex()).powu(3);
        let direct = Complex64::from_polar(0.7f64.exp(), 0.4) * q.powu(3);
        assert!((r.eval(z).unwrap() - direct).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let r = RationalFunction {
            terms: vec![
                Term::Poles { pole: Point::new(0.1, -0.3), coefficients: vec![c(1.0 / 3.0, 0.0), c(0.0, -2.5e-7)] },
                Term::Polynomial(vec![c(1.0, 2.0), c(-0.1, std::f64::consts::PI)]),
                Term::RootPower { roots: vec![Point::new(0.7, 0.1)], pole: None, power: 17, ln_scale: -3.25, phase: 0.0 },
                Term::RootPower { roots: vec![Point::new(0.2, 0.2)], pole: Some(Point::new(1e-3, 0.0)), power: 2, ln_scale: 1e-300, phase: 1.0 },
            ],
            pole_attestations: vec![PoleAttestation { pole: Point::new(0.1, -0.3), in_complement: true }],
        };
        let back = RationalFunction::from_text(&r.to_text()).unwrap();
        assert_eq!(back, r);
        assert!(RationalFunction::from_text("rational\nbogus\nend").is_err());
    }

    proptest! {
        #[test]
        fn ball_bounds_enclose_values(
            x in -1.0f64..1.0, y in -1.0f64..1.0, rho in 0.0f64..0.05,
            dx in -1.0f64..1.0, dy in -1.0f64..1.0,
        ) {
            let r = RationalFunction {
                terms: vec![
                    Term::Poles { pole: Point::new(1.5, 0.0), coefficients: vec![c(0.5, 0.1), c(0.0, 1.0)] },
                    Term::Polynomial(vec![c(0.2, 0.0), c(0.0, 0.3), c(1.0, 0.0)]),
                    Term::RootPower { roots: vec![Point::new(0.3, 0.3), Point::new(-0.5, 0.1)], pole: Some(Point::new(-1.6, 0.0)), power: 3, ln_scale: 0.1, phase: 0.0 },
                ],
                pole_attestations: vec![],
            };
            let z = Point::new(x, y);
            let (lo, hi) = r.ball_bounds(z, rho);
            let w = z + Point::new(dx, dy).unit() * (rho * dx.abs().min(1.0));
            let v = r.eval_log(w).unwrap().ln_abs;
            prop_assert!(v <= hi + 1e-9 && v >= lo - 1e-9, "{lo} <= {v} <= {hi}");
        }
    }
}
