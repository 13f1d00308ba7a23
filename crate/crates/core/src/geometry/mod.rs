//! Planar set geometry on grid masks: components, distances and
//! wedge/arc intersection predicates.

mod components;
mod curves;
mod distance;
mod edt;
mod mask;
mod point;
pub mod serial;

use thiserror::Error;

pub use components::{complement_components, label_free_cells, ComponentLabeling, BLOCKED};
pub use curves::{
    circle_circle_angles, wedge_hit_points, wedge_hits, CircularArc, HitTarget, Piece, Segment,
    Wedge,
};
pub use edt::DistanceField;
pub use distance::{set_distance, set_distance_with};
pub use mask::{Grid, GridMask, IRect};
pub use point::{point_segment_dist, Point};

/// Absolute tolerance of every geometric predicate, in plane units.
pub const PREDICATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("mask touches the frame boundary; a two-cell margin is required")]
    FrameTooTight,
    #[error("operation requires a nonempty mask")]
    EmptyMask,
    #[error("wedge legs differ in length or coordinates are not finite")]
    InvalidWedge,
    #[error("arc needs a positive radius and 0 < span <= 2 pi")]
    InvalidArc,
}
