use crate::geometry::{CircularArc, Point};

/// Planar graph of closed arcs meeting only at endpoints. Vertices are
/// merged endpoints; a full circle is a loop.
#[derive(Debug, Clone)]
pub struct ArcGraph {
    vertices: Vec<Point>,
    edges: Vec<(usize, usize)>,
    active: Vec<bool>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

impl ArcGraph {
    /// Endpoints closer than `tol` are the same vertex.
    pub fn new(arcs: &[CircularArc], tol: f64) -> Self {
        let mut vertices: Vec<Point> = Vec::new();
        let mut vertex = |p: Point| -> usize {
            match vertices.iter().position(|v| v.dist(p) <= tol) {
                Some(k) => k,
                None => {
                    vertices.push(p);
                    vertices.len() - 1
                }
            }
        };
        let edges: Vec<(usize, usize)> = arcs
            .iter()
            .map(|a| {
                let s = vertex(a.start());
                let e = if a.is_full() { s } else { vertex(a.end()) };
                (s, e)
            })
            .collect();
        let active = vec![true; edges.len()];
        ArcGraph { vertices, edges, active }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }

    fn components_without(&self, skip: Option<usize>) -> (Vec<usize>, usize) {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        let mut count = self.vertices.len();
        for (k, &(u, v)) in self.edges.iter().enumerate() {
            if !self.active[k] || Some(k) == skip {
                continue;
            }
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru] = rv;
                count -= 1;
            }
        }
        (parent, count)
    }

    /// Components of the complement of the arcs' union: `E - V + C + 1`.
    pub fn face_count(&self) -> usize {
        let (_, c) = self.components_without(None);
        self.edge_count() + c + 1 - self.vertices.len()
    }

    /// An arc separates two complementary components exactly when it lies
    /// on a cycle, i.e. is not a bridge.
    pub fn is_separating(&self, e: usize) -> bool {
        if !self.active[e] {
            return false;
        }
        let (u, v) = self.edges[e];
        if u == v {
            return true;
        }
        let (mut parent, _) = self.components_without(Some(e));
        find(&mut parent, u) == find(&mut parent, v)
    }

    /// Opens the arc: its edge disappears, the remaining pieces hang off its
    /// endpoints as trees.
    pub fn cut(&mut self, e: usize) {
        self.active[e] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::boundary_arcs;

    #[test]
    fn lens_boundary_is_one_cycle() {
        let arcs = boundary_arcs(&[
            CircularArc::full_circle(Point::new(-0.5, 0.0), 1.0),
            CircularArc::full_circle(Point::new(0.5, 0.0), 1.0),
        ]);
        let mut g = ArcGraph::new(&arcs, 1e-9);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.face_count(), 2);
        assert!(g.is_separating(0));
        g.cut(0);
        assert_eq!(g.face_count(), 1);
        assert!(!g.is_separating(1));
    }

    #[test]
    fn three_disks_with_a_pocket() {
        // three unit disks around a small uncovered pocket
        let c: Vec<CircularArc> = (0..3)
            .map(|k| CircularArc::full_circle(Point::polar(1.1, k as f64 * 2.0 * std::f64::consts::PI / 3.0), 1.0))
            .collect();
        let arcs = boundary_arcs(&c);
        let mut g = ArcGraph::new(&arcs, 1e-9);
        assert_eq!(g.face_count(), 3);
        let mut cuts = 0;
        for e in 0..arcs.len() {
            if g.is_separating(e) {
                let before = g.face_count();
                g.cut(e);
                assert_eq!(before - g.face_count(), 1);
                cuts += 1;
            }
        }
        assert_eq!(cuts, 2);
        assert_eq!(g.face_count(), 1);
    }

    #[test]
    fn circle_is_a_loop() {
        let g = ArcGraph::new(&[CircularArc::full_circle(Point::ORIGIN, 1.0)], 1e-9);
        assert_eq!(g.face_count(), 2);
        assert!(g.is_separating(0));
    }
}
