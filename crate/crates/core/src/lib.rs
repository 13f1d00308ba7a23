//! Constructive machinery for planar fine domains at desk scale.
//!
//! The pipeline builds a special exhaustion `K_1 ⊂ K_2 ⊂ ...` of a domain,
//! places barrier sets `L_n` between consecutive stages, synthesizes a
//! rational series that is small on every `K_n` and large on every `L_n`,
//! and certifies each of those properties numerically.

pub mod barrier;
pub mod exhaustion;
pub mod geometry;
pub mod hexfloat;
pub mod par;
pub mod potential;
pub mod runge;
pub mod scenario;
