//! Scenario configs, the full certification pipeline, blow-up checks and
//! artifact export.

mod artifacts;
mod blowup;
mod config;
mod export;
mod report;
mod run;

use thiserror::Error;

use crate::barrier::BarrierError;
use crate::exhaustion::ExhaustionError;
use crate::geometry::GeometryError;
use crate::runge::RungeError;

pub use artifacts::{
    pieces_to_text, read_run, report_file_name, write_run, StoredRun, FUNCTION_FILE, SCENARIO_FILE, STAGES_FILE, TIMING_FILE,
};
pub use blowup::{
    blowup_report, certify_blowup_mechanics, stage_floor, BlowupInputs, BlowupOptions, BlowupRecord, TrialOutcome, MAX_ATTEMPTS_PER_TRIAL,
};
pub use config::{number, shipped_names, Scenario, StageLaw, DEFAULT_BLOWUP_TRIALS, DEFAULT_WEDGE_TRIALS};
pub use export::{
    export_field, read_csv, sample_field, to_csv, to_pgm, ExportFiles, Field, FieldSample, Region, CSV_HEADER,
};
pub use report::{CertificateReport, Section, REPORT_SCHEMA};
pub use run::{
    barrier_seed, failure_report, run_scenario, Continuation, RunOutput, TelescopingBound, K_SAMPLES_PER_EDGE,
    L_STEP_CELLS,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config: {0}")]
    Config(String),
    #[error("artifact: {0}")]
    Artifact(String),
    #[error("bound {bound} needs more than {stages} stages")]
    InsufficientStages { bound: f64, stages: usize },
    #[error(transparent)]
    Exhaustion(#[from] ExhaustionError),
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error(transparent)]
    Runge(#[from] RungeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
