use std::collections::BTreeSet;

use crate::geometry::{complement_components, set_distance, GridMask};
use crate::par::ExecMode;

use super::domain::FSigmaDomain;
use super::ExhaustionError;

/// One stage `K_n` of an exhaustion.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub mask: GridMask,
    /// Distance from `K_{n-1}` to the complement of `K_n`; one cell for `n = 1`.
    pub interior_margin: f64,
    pub radius: f64,
    /// Bounded complement components merged by [`specialize`], as labels of
    /// the unspecialized stage.
    pub filled_components: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustionSequence {
    pub stages: Vec<Stage>,
    pub special: bool,
}

impl ExhaustionSequence {
    /// `K_n`, 1-based.
    pub fn stage(&self, n: usize) -> &GridMask {
        &self.stages[n - 1].mask
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }
}

/// Region a stage-`stage` sandwich may grow into: the next inner compact,
/// or the domain itself after the last one.
fn available(u: &FSigmaDomain, stage: usize) -> GridMask {
    match u.inner_compacts.get(stage) {
        Some(next) => next.intersection(&u.interior),
        None => u.interior.clone(),
    }
}

/// `K ⊂ V ⊂ cl V ⊂ U`: `K` dilated by half its margin inside the available
/// region, minus closed `h`-disks about the exceptional points.
pub fn lusin_menchoff_sandwich(k: &GridMask, u: &FSigmaDomain, stage: usize) -> Result<GridMask, ExhaustionError> {
    let h = u.grid.h;
    let avail = available(u, stage);
    if k.is_empty() {
        return Err(ExhaustionError::Geometry(crate::geometry::GeometryError::EmptyMask));
    }
    if !k.is_subset_of(&avail) {
        return Err(ExhaustionError::NoMargin { stage, margin: 0.0 });
    }
    let blocked = avail.complement_in(u.frame);
    let margin = set_distance(k, &blocked)?;
    if margin < 2.0 * h {
        return Err(ExhaustionError::NoMargin { stage, margin });
    }
    let v = k.dilate(0.5 * margin).difference(&u.puncture_cells());
    if !v.is_subset_of(&u.interior) {
        return Err(ExhaustionError::NoMargin { stage, margin });
    }
    Ok(v)
}

/// Result of filling the holes of one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Specialized {
    pub mask: GridMask,
    pub filled: Vec<u32>,
}

/// Fills every bounded complementary component of `k` that contains neither
/// a cell of the largest complement compact nor an exceptional point.
pub fn specialize(k: &GridMask, u: &FSigmaDomain) -> Result<Specialized, ExhaustionError> {
    let labels = complement_components(k, u.frame)?;
    let f = u.complement_compacts.last().expect("domain has complement compacts");
    let mut witnessed = BTreeSet::new();
    for (i, j) in f.cells() {
        if let Some(l) = labels.label(i, j) {
            witnessed.insert(l);
        }
    }
    for e in &u.exceptional_points {
        let (i, j) = u.grid.cell_of(*e);
        if let Some(l) = labels.label(i, j) {
            witnessed.insert(l);
        }
    }
    let filled: Vec<u32> = labels.bounded_ids.iter().copied().filter(|id| !witnessed.contains(id)).collect();
    if filled.is_empty() {
        return Ok(Specialized { mask: k.clone(), filled });
    }
    let fill: BTreeSet<u32> = filled.iter().copied().collect();
    let frame = labels.frame;
    let mask = GridMask::from_fn(k.grid(), frame, ExecMode::Parallel, |i, j| {
        k.contains(i, j) || labels.labels[frame.index(i, j)] != crate::geometry::BLOCKED && fill.contains(&labels.labels[frame.index(i, j)])
    });
    Ok(Specialized { mask, filled })
}

/// Stage radius `max |z|` over `F~_n`, plus `n`.
fn stage_radius(u: &FSigmaDomain, n: usize) -> f64 {
    u.inner_compacts[n - 1].max_norm() + n as f64
}

/// `K_1 = F~_1`, `K_{n+1} = cl V_{n+1} ∩ cl B(0, r_{n+1})` with `V_{n+1}`
/// the sandwich of `F~_{n+1} ∪ K_n`; every stage is then specialized.
pub fn build_fine_exhaustion(u: &FSigmaDomain) -> Result<ExhaustionSequence, ExhaustionError> {
    let g = u.grid;
    let n_stages = u.stage_count();
    let mut raw = vec![u.inner_compacts[0].clone()];
    for n in 1..n_stages {
        let seed = u.inner_compacts[n].union(&raw[n - 1]);
        let v = lusin_menchoff_sandwich(&seed, u, n + 1)?;
        let r = stage_radius(u, n + 1);
        let half_diag = 0.5 * g.h * std::f64::consts::SQRT_2;
        let k = GridMask::from_fn(g, v.bbox(), ExecMode::Parallel, |i, j| {
            v.contains(i, j) && g.cell_center(i, j).norm() + half_diag <= r
        });
        raw.push(k);
    }
    let mut stages: Vec<Stage> = Vec::with_capacity(n_stages);
    for (idx, k) in raw.iter().enumerate() {
        let n = idx + 1;
        let s = specialize(k, u)?;
        let interior_margin = match stages.last() {
            None => g.h,
            Some(prev) => {
                if !prev.mask.is_subset_of(&s.mask) {
                    return Err(ExhaustionError::NestingFailure { stage: n });
                }
                let outside = s.mask.complement_in(u.frame);
                set_distance(&prev.mask, &outside)?
            }
        };
        if !(interior_margin > 0.0) {
            return Err(ExhaustionError::NestingFailure { stage: n });
        }
        stages.push(Stage {
            mask: s.mask,
            interior_margin,
            radius: stage_radius(u, n),
            filled_components: s.filled,
        });
    }
    Ok(ExhaustionSequence { stages, special: true })
}
