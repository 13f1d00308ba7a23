//! Barrier compacts `L_n` between consecutive exhaustion stages.

mod assemble;
mod cover;
mod cut;
mod graph;
mod raster;

use thiserror::Error;

use crate::geometry::{GeometryError, Point};
use crate::potential::PotentialError;

pub use assemble::{assemble_barrier, BarrierCertificates, BarrierInputs, BarrierStage};
pub use cover::{boundary_arcs, build_circle_cover, extract_arcs, CircleCover};
pub use cut::{arc_cut, choose_cut_radius, ArcCutResult};
pub use graph::ArcGraph;
pub use raster::{rasterize_pieces, HoleWitness, RefinedComplement};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BarrierError {
    #[error("K_n and F_n are only {delta} apart; at least two cells are required")]
    SeparationFailure { delta: f64 },
    #[error("no covering circle fits inside K_(n+1) at {at:?}")]
    CoverFailure { at: Point },
    #[error("cut point too close to an arc endpoint or radius not below the arc radius")]
    GeometryDegenerate,
    #[error("stage {stage}: {source}")]
    Stage { stage: usize, source: Box<BarrierError> },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
