use std::fmt::Write as _;

use crate::exhaustion::{DomainDescription, Primitive};
use crate::geometry::Point;

use super::ScenarioError;

/// How the per-stage insets (or puncture radii) are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum StageLaw {
    /// `scale / n` for `n = 1, 2, ...`.
    Harmonic(f64),
    /// Explicit values; needs at least `stages + 1` entries.
    List(Vec<f64>),
}

impl StageLaw {
    fn values(&self, count: usize) -> Result<Vec<f64>, ScenarioError> {
        match self {
            StageLaw::Harmonic(c) => Ok((1..=count).map(|n| c / n as f64).collect()),
            StageLaw::List(v) if v.len() >= count => Ok(v[..count].to_vec()),
            StageLaw::List(v) => Err(ScenarioError::Config(format!(
                "{} stage values given, {count} needed (one more than the stage count)",
                v.len()
            ))),
        }
    }

    fn to_line(&self, key: &str) -> String {
        match self {
            StageLaw::Harmonic(c) => format!("{key}_scale = {c:?}"),
            StageLaw::List(v) => format!("{key}s = {}", join(v)),
        }
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
}

/// A runnable scenario. Defaults are echoed into every report.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    /// Number of barrier/synthesis stages `N`; the exhaustion has `N + 1`.
    pub stages: usize,
    pub resolution: f64,
    pub seed: u64,
    pub wedge_trials: usize,
    pub blowup_trials: usize,
    pub alpha: f64,
    pub primitives: Vec<Primitive>,
    pub exceptional: Vec<Point>,
    pub window: [f64; 4],
    pub insets: StageLaw,
    pub punctures: StageLaw,
}

pub const DEFAULT_WEDGE_TRIALS: usize = 10_000;
pub const DEFAULT_BLOWUP_TRIALS: usize = 1_000;

const SHIPPED: [(&str, &str); 4] = [
    ("unit-disc", include_str!("../../scenarios/unit-disc.cfg")),
    ("punctured-disc", include_str!("../../scenarios/punctured-disc.cfg")),
    ("two-discs", include_str!("../../scenarios/two-discs.cfg")),
    ("rationals-truncated", include_str!("../../scenarios/rationals-truncated.cfg")),
];

/// Names of the scenarios bundled with the library.
pub fn shipped_names() -> Vec<&'static str> {
    SHIPPED.iter().map(|s| s.0).collect()
}

/// A decimal or a fraction `p/q`.
pub fn number(s: &str) -> Result<f64, ScenarioError> {
    let s = s.trim();
    let v = match s {
        "sqrt2" => std::f64::consts::SQRT_2,
        _ => match s.split_once('/') {
            Some((a, b)) => number(a)? / number(b)?,
            None => s.parse::<f64>().map_err(|_| ScenarioError::Config(format!("not a number: '{s}'")))?,
        },
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ScenarioError::Config(format!("not a finite number: '{s}'")))
    }
}

fn numbers(s: &str) -> Result<Vec<f64>, ScenarioError> {
    s.split_whitespace().map(number).collect()
}

fn integer(s: &str) -> Result<u64, ScenarioError> {
    s.trim().parse().map_err(|_| ScenarioError::Config(format!("not a non-negative integer: '{s}'")))
}

impl Scenario {
    /// A bundled scenario by name.
    pub fn named(name: &str) -> Result<Self, ScenarioError> {
        let text = SHIPPED
            .iter()
            .find(|s| s.0 == name)
            .ok_or_else(|| ScenarioError::Config(format!("unknown scenario '{name}'")))?
            .1;
        Scenario::parse(text)
    }

    /// Parses `[scenario]` and `[domain]` sections of `key = value` lines;
    /// `#` starts a comment. `disk`, `annulus`, `polygon` and `exceptional`
    /// may repeat.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut sc = Scenario {
            name: String::new(),
            stages: 0,
            resolution: 0.0,
            seed: 0,
            wedge_trials: DEFAULT_WEDGE_TRIALS,
            blowup_trials: DEFAULT_BLOWUP_TRIALS,
            alpha: std::f64::consts::SQRT_2,
            primitives: Vec::new(),
            exceptional: Vec::new(),
            window: [0.0; 4],
            insets: StageLaw::Harmonic(0.5),
            punctures: StageLaw::Harmonic(0.1),
        };
        let mut section = String::new();
        let mut seen_stages = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let ctx = |e: ScenarioError| ScenarioError::Config(format!("line {}: {e}", lineno + 1));
            if let Some(s) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = s.trim().to_string();
                if section != "scenario" && section != "domain" {
                    return Err(ctx(ScenarioError::Config(format!("unknown section [{section}]"))));
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| ctx(ScenarioError::Config("expected 'key = value'".into())))?;
            let res: Result<(), ScenarioError> = (|| {
                match (section.as_str(), key) {
                    ("scenario", "name") => sc.name = value.to_string(),
                    ("scenario", "stages") => {
                        sc.stages = integer(value)? as usize;
                        seen_stages = true;
                    }
                    ("scenario", "resolution") => sc.resolution = number(value)?,
                    ("scenario", "seed") => sc.seed = integer(value)?,
                    ("scenario", "wedge_trials") => sc.wedge_trials = integer(value)? as usize,
                    ("scenario", "blowup_trials") => sc.blowup_trials = integer(value)? as usize,
                    ("scenario", "alpha") => sc.alpha = number(value)?,
                    ("domain", "window") => {
                        let v = numbers(value)?;
                        sc.window = v.try_into().map_err(|_| ScenarioError::Config("window needs 4 numbers".into()))?;
                    }
                    ("domain", "disk") => match numbers(value)?[..] {
                        [x, y, r] => sc.primitives.push(Primitive::Disk { center: Point::new(x, y), radius: r }),
                        _ => return Err(ScenarioError::Config("disk needs 'x y r'".into())),
                    },
                    ("domain", "annulus") => match numbers(value)?[..] {
                        [x, y, a, b] => sc.primitives.push(Primitive::Annulus { center: Point::new(x, y), inner: a, outer: b }),
                        _ => return Err(ScenarioError::Config("annulus needs 'x y inner outer'".into())),
                    },
                    ("domain", "polygon") => {
                        let v = numbers(value)?;
                        if v.len() < 6 || v.len() % 2 == 1 {
                            return Err(ScenarioError::Config("polygon needs at least three 'x y' vertices".into()));
                        }
                        sc.primitives.push(Primitive::Polygon(v.chunks(2).map(|c| Point::new(c[0], c[1])).collect()));
                    }
                    ("domain", "exceptional") => {
                        let v = numbers(value)?;
                        if v.is_empty() || v.len() % 2 == 1 {
                            return Err(ScenarioError::Config("exceptional needs 'x y' pairs".into()));
                        }
                        sc.exceptional.extend(v.chunks(2).map(|c| Point::new(c[0], c[1])));
                    }
                    ("domain", "inset_scale") => sc.insets = StageLaw::Harmonic(number(value)?),
                    ("domain", "insets") => sc.insets = StageLaw::List(numbers(value)?),
                    ("domain", "puncture_scale") => sc.punctures = StageLaw::Harmonic(number(value)?),
                    ("domain", "punctures") => sc.punctures = StageLaw::List(numbers(value)?),
                    ("", _) => return Err(ScenarioError::Config("key outside a section".into())),
                    (s, k) => return Err(ScenarioError::Config(format!("unknown key '{k}' in [{s}]"))),
                }
                Ok(())
            })();
            res.map_err(ctx)?;
        }
        if !seen_stages {
            return Err(ScenarioError::Config("missing 'stages'".into()));
        }
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: &str| Err(ScenarioError::Config(m.into()));
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return bad("name must be nonempty and use only letters, digits, '-' and '_'");
        }
        if self.stages == 0 {
            return bad("stages must be at least 1");
        }
        if !(self.resolution > 0.0) {
            return bad("resolution must be positive");
        }
        if !(self.alpha > 1.0) {
            return bad("alpha must exceed 1");
        }
        self.domain()?.validate()?;
        Ok(())
    }

    /// The domain with `stages + 1` inner compacts.
    pub fn domain(&self) -> Result<DomainDescription, ScenarioError> {
        let count = self.stages + 1;
        Ok(DomainDescription {
            primitives: self.primitives.clone(),
            exceptional: self.exceptional.clone(),
            insets: self.insets.values(count)?,
            puncture_radii: self.punctures.values(count)?,
            window: self.window,
        })
    }

    /// Config text that parses back to `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::from("[scenario]\n");
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "stages = {}", self.stages);
        let _ = writeln!(s, "resolution = {:?}", self.resolution);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "wedge_trials = {}", self.wedge_trials);
        let _ = writeln!(s, "blowup_trials = {}", self.blowup_trials);
        let _ = writeln!(s, "alpha = {:?}", self.alpha);
        s.push_str("\n[domain]\n");
        let _ = writeln!(s, "window = {}", join(&self.window));
        for p in &self.primitives {
            let _ = match p {
                Primitive::Disk { center, radius } => writeln!(s, "disk = {}", join(&[center.x, center.y, *radius])),
                Primitive::Annulus { center, inner, outer } => {
                    writeln!(s, "annulus = {}", join(&[center.x, center.y, *inner, *outer]))
                }
                Primitive::Polygon(v) => {
                    writeln!(s, "polygon = {}", join(&v.iter().flat_map(|p| [p.x, p.y]).collect::<Vec<_>>()))
                }
            };
        }
        for e in &self.exceptional {
            let _ = writeln!(s, "exceptional = {}", join(&[e.x, e.y]));
        }
        let _ = writeln!(s, "{}", self.insets.to_line("inset"));
        let _ = writeln!(s, "{}", self.punctures.to_line("puncture"));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_scenarios_parse_and_round_trip() {
        for name in shipped_names() {
            let sc = Scenario::named(name).unwrap();
            assert_eq!(sc.name, name);
            assert_eq!(Scenario::parse(&sc.to_text()).unwrap(), sc);
        }
    }

    #[test]
    fn zero_stages_is_rejected() {
        let text = Scenario::named("unit-disc").unwrap().to_text().replace("stages = 4", "stages = 0");
        assert!(matches!(Scenario::parse(&text), Err(ScenarioError::Config(_))));
    }

    #[test]
    fn malformed_lines_are_reported_with_line_numbers() {
        let err = Scenario::parse("[scenario]\nname = x\nstages = 1\nresolution = oops\n").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
        assert!(Scenario::parse("[bogus]\n").is_err());
        assert!(Scenario::parse("name = x\n").is_err());
    }

    #[test]
    fn fractions_and_lists() {
        assert_eq!(number("1/256").unwrap(), 1.0 / 256.0);
        assert_eq!(StageLaw::Harmonic(0.5).values(3).unwrap(), vec![0.5, 0.25, 0.5 / 3.0]);
        assert!(StageLaw::List(vec![0.3, 0.2]).values(3).is_err());
    }
}
