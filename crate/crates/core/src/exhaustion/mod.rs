//! Special fine exhaustions `K_1 ⊂ K_2 ⊂ ...` of grid-represented domains.

mod build;
mod certify;
mod domain;

use thiserror::Error;

use crate::geometry::GeometryError;

pub use build::{build_fine_exhaustion, lusin_menchoff_sandwich, specialize, ExhaustionSequence, Specialized, Stage};
pub use certify::{certify_exhaustion, ExhaustionCertificate};
pub use domain::{DomainDescription, FSigmaDomain, Primitive};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExhaustionError {
    #[error("stage {stage}: compact touches the complement at this resolution (margin {margin})")]
    NoMargin { stage: usize, margin: f64 },
    #[error("stage {stage}: stages are not nested with a positive margin")]
    NestingFailure { stage: usize },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
