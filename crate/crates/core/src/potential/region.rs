use crate::geometry::{DistanceField, GridMask, Point, Segment};

/// A finely open set, seen through the one question certification needs:
/// does it contain the whole closed ball `B(z, rho)`?
///
/// Implementations must be conservative: `true` is a guarantee, `false`
/// may be a resolution artefact.
pub trait FineRegion: Sync {
    fn contains_ball(&self, z: Point, rho: f64) -> bool;

    fn contains(&self, z: Point) -> bool {
        self.contains_ball(z, 0.0)
    }
}

/// The whole plane.
#[derive(Debug, Clone, Copy, Default)]
pub struct Plane;

impl FineRegion for Plane {
    fn contains_ball(&self, _z: Point, _rho: f64) -> bool {
        true
    }
}

/// Closed obstacles removed from a region.
#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle {
    Point(Point),
    Segment(Segment),
    /// Closed disk.
    Disk(Point, f64),
}

impl Obstacle {
    fn distance(&self, z: Point) -> f64 {
        match self {
            Obstacle::Point(p) => z.dist(*p),
            Obstacle::Segment(s) => s.dist_to_point(z),
            Obstacle::Disk(c, r) => (z.dist(*c) - r).max(0.0),
        }
    }
}

/// An open disk (or the plane) minus finitely many closed obstacles.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PuncturedRegion {
    pub disk: Option<(Point, f64)>,
    pub obstacles: Vec<Obstacle>,
}

impl PuncturedRegion {
    pub fn disk(center: Point, radius: f64) -> Self {
        PuncturedRegion {
            disk: Some((center, radius)),
            obstacles: Vec::new(),
        }
    }

    pub fn plane() -> Self {
        PuncturedRegion::default()
    }

    pub fn without(mut self, o: Obstacle) -> Self {
        self.obstacles.push(o);
        self
    }
}

impl FineRegion for PuncturedRegion {
    fn contains_ball(&self, z: Point, rho: f64) -> bool {
        if let Some((c, r)) = self.disk {
            if z.dist(c) + rho >= r {
                return false;
            }
        }
        self.obstacles.iter().all(|o| o.distance(z) > rho)
    }
}

/// Points lying at least `margin` inside a mask: a grid surrogate for the
/// fine interior of a compact stage.
#[derive(Debug, Clone)]
pub struct MaskInterior {
    field: DistanceField,
    pub margin: f64,
}

impl MaskInterior {
    pub fn new(mask: &GridMask, margin: f64) -> Self {
        MaskInterior {
            field: DistanceField::of_complement(mask),
            margin,
        }
    }

    /// Conservative distance from `z` to the complement of the mask.
    pub fn clearance(&self, z: Point) -> f64 {
        self.field.clearance(z)
    }
}

impl FineRegion for MaskInterior {
    fn contains_ball(&self, z: Point, rho: f64) -> bool {
        self.clearance(z) > rho + self.margin
    }
}

/// Intersection of two regions.
pub struct Both<'a, A: ?Sized, B: ?Sized>(pub &'a A, pub &'a B);

impl<A: FineRegion + ?Sized, B: FineRegion + ?Sized> FineRegion for Both<'_, A, B> {
    fn contains_ball(&self, z: Point, rho: f64) -> bool {
        self.0.contains_ball(z, rho) && self.1.contains_ball(z, rho)
    }
}
