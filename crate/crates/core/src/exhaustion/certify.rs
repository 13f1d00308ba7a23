use crate::geometry::complement_components;

use super::build::ExhaustionSequence;
use super::domain::FSigmaDomain;
use super::ExhaustionError;

/// Checked properties of one exhaustion stage.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustionCertificate {
    pub n: usize,
    pub cells: usize,
    /// Distance from `K_{n-1}` to the complement of `K_n`.
    pub interior_margin: f64,
    /// `K_{n-1} ⊂ K_n` with a positive margin.
    pub nested: bool,
    /// `F~_n ⊂ K_n`.
    pub covers_inner: bool,
    /// `K_n` lies in the domain and misses every exceptional point.
    pub inside_domain: bool,
    pub bounded_holes: usize,
    /// Bounded components of `C \ K_n` holding no complement cell and no
    /// exceptional point.
    pub unwitnessed_holes: usize,
    /// Exceptional points left in a bounded hole of `K_n`.
    pub open_punctures: usize,
    pub filled_components: usize,
}

impl ExhaustionCertificate {
    pub fn special(&self) -> bool {
        self.unwitnessed_holes == 0
    }

    pub fn all_hold(&self) -> bool {
        self.nested && self.covers_inner && self.inside_domain && self.special()
    }
}

/// Re-checks every stage of `seq` against `u` from scratch.
pub fn certify_exhaustion(u: &FSigmaDomain, seq: &ExhaustionSequence) -> Result<Vec<ExhaustionCertificate>, ExhaustionError> {
    let f_last = u.complement_compact(u.stage_count());
    let mut out = Vec::with_capacity(seq.len());
    for (idx, st) in seq.stages.iter().enumerate() {
        let n = idx + 1;
        let nested = match idx {
            0 => true,
            _ => seq.stages[idx - 1].mask.is_subset_of(&st.mask) && st.interior_margin > 0.0,
        };
        let labels = complement_components(&st.mask, u.frame)?;
        let mut witnessed = vec![false; labels.component_count()];
        for (i, j) in f_last.cells() {
            if let Some(l) = labels.label(i, j) {
                witnessed[l as usize] = true;
            }
        }
        let mut open_punctures = 0;
        for e in &u.exceptional_points {
            let (i, j) = u.grid.cell_of(*e);
            if let Some(l) = labels.label(i, j) {
                witnessed[l as usize] = true;
                if labels.bounded_ids.contains(&l) {
                    open_punctures += 1;
                }
            }
        }
        out.push(ExhaustionCertificate {
            n,
            cells: st.mask.count(),
            interior_margin: st.interior_margin,
            nested,
            covers_inner: u.inner_compacts[idx].is_subset_of(&st.mask),
            inside_domain: st.mask.is_subset_of(&u.interior)
                && u.exceptional_points.iter().all(|e| !st.mask.contains_point(*e)),
            bounded_holes: labels.bounded_ids.len(),
            unwitnessed_holes: labels.bounded_ids.iter().filter(|id| !witnessed[**id as usize]).count(),
            open_punctures,
            filled_components: st.filled_components.len(),
        });
    }
    Ok(out)
}
