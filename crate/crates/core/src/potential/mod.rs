//! Logarithmic potentials: generators of fine neighbourhoods, the radial
//! thinness integral, good circles, wedges and discrete equilibrium measures.

mod circles;
mod equilibrium;
mod generator;
mod occupancy;
mod region;
mod wedge;

use thiserror::Error;

pub use circles::{find_good_circle, good_circle_threshold, CIRCLE_SAMPLES};
pub use equilibrium::{equilibrium_along, equilibrium_measure, leja_points, outer_boundary, point_set_capacity, DiscreteMeasure, Equilibrium};
pub use generator::{Atom, FinelyOpenPatch, SubharmonicGenerator};
pub use occupancy::{radial_occupancy_integral, RadialOccupancy};
pub use region::{Both, FineRegion, MaskInterior, Obstacle, Plane, PuncturedRegion};
pub use wedge::{find_wedge, find_wedge_with, wedge_certified, WedgeSearch, DEFAULT_ALPHA};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("no good circle in [C^-(n+1), C^-n]: {0}")]
    NoCircleFound(String),
    #[error("no wedge found within the length budget at this resolution")]
    WedgeNotFound,
    #[error("wedge endpoints coincide")]
    SamePoint,
    #[error("set is a single cell; capacity is below the grid scale")]
    DegenerateSet,
    #[error("operation requires a nonempty mask")]
    EmptyMask,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
