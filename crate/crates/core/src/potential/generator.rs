use crate::geometry::Point;
use crate::hexfloat;

use super::region::FineRegion;
use super::PotentialError;

/// Weighted logarithmic atom `w log|z - q|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub at: Point,
    pub weight: f64,
}

/// `h(z) = sum_i w_i log|z - q_i| + c` with nonnegative weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SubharmonicGenerator {
    atoms: Vec<Atom>,
    constant: f64,
}

impl SubharmonicGenerator {
    pub fn new(atoms: Vec<Atom>, constant: f64) -> Result<Self, PotentialError> {
        if atoms.iter().any(|a| !(a.weight >= 0.0) || !a.at.is_finite()) || !constant.is_finite() {
            return Err(PotentialError::InvalidParameter(
                "generator weights must be finite and nonnegative".into(),
            ));
        }
        Ok(SubharmonicGenerator { atoms, constant })
    }

    pub fn constant(c: f64) -> Self {
        SubharmonicGenerator {
            atoms: Vec::new(),
            constant: c,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    /// Exact value; `-inf` at an atom carrying positive weight.
    pub fn eval(&self, z: Point) -> f64 {
        let mut v = self.constant;
        for a in &self.atoms {
            if a.weight > 0.0 {
                v += a.weight * z.dist(a.at).ln();
            }
        }
        v
    }

    /// Upper bound of `|grad h|` on the closed disk `B(z, rho)`; infinite
    /// when the disk reaches a weighted atom.
    pub fn gradient_bound(&self, z: Point, rho: f64) -> f64 {
        let mut g = 0.0;
        for a in &self.atoms {
            if a.weight > 0.0 {
                let d = z.dist(a.at) - rho;
                if d <= 0.0 {
                    return f64::INFINITY;
                }
                g += a.weight / d;
            }
        }
        g
    }
}

/// `V = {z in B(center, radius) : h(z) > 0}`, a basic fine neighbourhood.
#[derive(Debug, Clone, PartialEq)]
pub struct FinelyOpenPatch {
    pub center: Point,
    pub radius: f64,
    pub generator: SubharmonicGenerator,
    /// `h(center)` at construction time.
    pub normalization: f64,
}

impl FinelyOpenPatch {
    /// Builds the patch; the center must belong to it (`h(center) > 0`).
    pub fn new(center: Point, radius: f64, generator: SubharmonicGenerator) -> Result<Self, PotentialError> {
        if !(radius > 0.0) {
            return Err(PotentialError::InvalidParameter("patch radius must be positive".into()));
        }
        let normalization = generator.eval(center);
        if !(normalization > 0.0) {
            return Err(PotentialError::InvalidParameter(
                "patch center must satisfy h(center) > 0".into(),
            ));
        }
        Ok(FinelyOpenPatch {
            center,
            radius,
            generator,
            normalization,
        })
    }

    /// Plain-text scenario block.
    pub fn to_text(&self) -> String {
        let mut s = String::from("[patch]\n");
        s += &format!(
            "center = {} {}\nradius = {}\nconstant = {}\n",
            hexfloat::format(self.center.x),
            hexfloat::format(self.center.y),
            hexfloat::format(self.radius),
            hexfloat::format(self.generator.constant)
        );
        for a in &self.generator.atoms {
            s += &format!(
                "atom = {} {} {}\n",
                hexfloat::format(a.at.x),
                hexfloat::format(a.at.y),
                hexfloat::format(a.weight)
            );
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, PotentialError> {
        let bad = |m: &str| PotentialError::InvalidParameter(format!("patch block: {m}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        if lines.next() != Some("[patch]") {
            return Err(bad("missing header"));
        }
        let mut center = None;
        let mut radius = None;
        let mut constant = 0.0;
        let mut atoms = Vec::new();
        for line in lines {
            let (k, v) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let nums: Vec<f64> = v
                .split_whitespace()
                .map(hexfloat::parse)
                .collect::<Option<_>>()
                .ok_or_else(|| bad("bad number"))?;
            match (k.trim(), nums.as_slice()) {
                ("center", [x, y]) => center = Some(Point::new(*x, *y)),
                ("radius", [r]) => radius = Some(*r),
                ("constant", [c]) => constant = *c,
                ("atom", [x, y, w]) => atoms.push(Atom {
                    at: Point::new(*x, *y),
                    weight: *w,
                }),
                _ => return Err(bad(line)),
            }
        }
        let generator = SubharmonicGenerator::new(atoms, constant)?;
        FinelyOpenPatch::new(
            center.ok_or_else(|| bad("missing center"))?,
            radius.ok_or_else(|| bad("missing radius"))?,
            generator,
        )
    }
}

impl FineRegion for FinelyOpenPatch {
    fn contains_ball(&self, z: Point, rho: f64) -> bool {
        if z.dist(self.center) + rho >= self.radius {
            return false;
        }
        let g = self.generator.gradient_bound(z, rho);
        g.is_finite() && self.generator.eval(z) - rho * g > 0.0
    }
}
