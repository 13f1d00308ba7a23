//! Rational functions small on `K_n` and large on `L_n`, their partial sums,
//! and a circle-scan classifier for isolated singularities.

mod fit;
mod logval;
mod rational;
mod singularity;
mod synth;

use thiserror::Error;

use crate::geometry::{GeometryError, Point};
use crate::potential::PotentialError;

pub use fit::{
    certify_two_level, fit_two_level_rational, fit_with_samples, FitCertificate, FitOptions, FitStrategy, PoleSite,
    SampleSet, TwoLevelFit, MAX_POLE_ORDER,
};
pub use logval::{ln_diff_exp, ln_sum_exp, LogValue};
pub use rational::{PoleAttestation, RationalFunction, Term, POLE_TOLERANCE};
pub use singularity::{classify_singularity, ScanRecord, SingularityClass, SingularityVerdict, SCAN_LEVELS};
pub use synth::{
    eval_grid, pole_distance, synthesize, Evaluate, PartialSum, StageBudget, StageCertificate, StagePlan,
    SynthesizedFunction, ValueGrid,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RungeError {
    #[error("no certified fit ({reason}); achieved ln max on K = {ln_max_on_k}, ln min on L = {ln_min_on_l}")]
    FitFailed { ln_max_on_k: f64, ln_min_on_l: f64, reason: String },
    #[error("evaluation point {at:?} is within tolerance of a pole")]
    PoleProximity { at: Point },
    #[error("no good circle about {at:?} on any scan level")]
    ScanFailed { at: Point },
    #[error("stage {stage}: {source}")]
    Stage { stage: usize, source: Box<RungeError> },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed rational function text: {0}")]
    Parse(String),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
