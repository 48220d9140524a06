//! Planar polygon helpers for building footprints.

use serde::{Deserialize, Serialize};

pub type Point2 = [f64; 2];

/// A simple polygon with an exterior ring and optional holes. Rings are
/// stored open (first vertex not repeated). After [`Polygon::normalized`]
/// the exterior runs counter-clockwise and holes clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub exterior: Vec<Point2>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<Vec<Point2>>,
}

/// Twice the signed area of a ring; positive for counter-clockwise.
pub fn ring_signed_area2(ring: &[Point2]) -> f64 {
    let n = ring.len();
    (0..n)
        .map(|i| {
            let a = ring[i];
            let b = ring[(i + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum()
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn on_segment(p: Point2, a: Point2, b: Point2) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test, touching included.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

fn strip_closing(mut ring: Vec<Point2>) -> Vec<Point2> {
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    ring
}

impl Polygon {
    pub fn new(exterior: Vec<Point2>, holes: Vec<Vec<Point2>>) -> Self {
        Self {
            exterior: strip_closing(exterior),
            holes: holes.into_iter().map(strip_closing).collect(),
        }
    }

    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self::new(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]], Vec::new())
    }

    pub fn rings(&self) -> impl Iterator<Item = &[Point2]> {
        std::iter::once(self.exterior.as_slice()).chain(self.holes.iter().map(Vec::as_slice))
    }

    /// All boundary edges, exterior first then holes, in ring order.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.rings()
            .flat_map(|ring| (0..ring.len()).map(move |i| (ring[i], ring[(i + 1) % ring.len()])))
    }

    pub fn area(&self) -> f64 {
        let outer = ring_signed_area2(&self.exterior).abs() / 2.0;
        let holes: f64 = self.holes.iter().map(|h| ring_signed_area2(h).abs() / 2.0).sum();
        outer - holes
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| (b[0] - a[0]).hypot(b[1] - a[1])).sum()
    }

    /// Area-weighted centroid.
    pub fn centroid(&self) -> Point2 {
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut a2 = 0.0;
        for (k, ring) in self.rings().enumerate() {
            let signed = ring_signed_area2(ring);
            // exterior counts positive, holes negative, independent of orientation
            let sign = if (k == 0) == (signed >= 0.0) { 1.0 } else { -1.0 };
            let n = ring.len();
            for i in 0..n {
                let p = ring[i];
                let q = ring[(i + 1) % n];
                let c = p[0] * q[1] - q[0] * p[1];
                cx += sign * (p[0] + q[0]) * c;
                cy += sign * (p[1] + q[1]) * c;
            }
            a2 += sign * signed;
        }
        [cx / (3.0 * a2), cy / (3.0 * a2)]
    }

    pub fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for p in &self.exterior {
            b[0] = b[0].min(p[0]);
            b[1] = b[1].max(p[0]);
            b[2] = b[2].min(p[1]);
            b[3] = b[3].max(p[1]);
        }
        b
    }

    /// Even-odd point-in-polygon test over all rings.
    pub fn contains(&self, p: Point2) -> bool {
        let mut inside = false;
        for ring in self.rings() {
            let n = ring.len();
            let mut j = n - 1;
            for i in 0..n {
                let (a, b) = (ring[i], ring[j]);
                if (a[1] > p[1]) != (b[1] > p[1]) {
                    let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                    if p[0] < x {
                        inside = !inside;
                    }
                }
                j = i;
            }
        }
        inside
    }

    /// Checks the polygon is simple with positive area. Returns a reason on
    /// failure.
    pub fn validate(&self) -> Result<(), String> {
        if self.exterior.len() < 3 {
            return Err("exterior ring has fewer than 3 vertices".into());
        }
        for ring in self.rings() {
            if ring.len() < 3 {
                return Err("hole has fewer than 3 vertices".into());
            }
            if ring.iter().flatten().any(|v| !v.is_finite()) {
                return Err("non-finite coordinate".into());
            }
        }
        if !(self.area() > 0.0) {
            return Err("area is not positive".into());
        }
        let edges: Vec<(Point2, Point2)> = self.edges().collect();
        let ring_starts = self.ring_offsets();
        for i in 0..edges.len() {
            if edges[i].0 == edges[i].1 {
                return Err("repeated vertex".into());
            }
            for j in (i + 1)..edges.len() {
                if adjacent_in_ring(i, j, &ring_starts) {
                    // adjacent edges share one vertex; only collinear overlap is invalid
                    let (a, b) = edges[i];
                    let (_, d) = edges[j];
                    let shared_at_end = edges[i].1 == edges[j].0;
                    let (other_i, other_j) = if shared_at_end { (a, d) } else { (b, edges[j].1) };
                    let pivot = if shared_at_end { b } else { a };
                    if cross(pivot, other_i, other_j) == 0.0 {
                        let u = [other_i[0] - pivot[0], other_i[1] - pivot[1]];
                        let v = [other_j[0] - pivot[0], other_j[1] - pivot[1]];
                        if u[0] * v[0] + u[1] * v[1] > 0.0 {
                            return Err("ring folds back on itself".into());
                        }
                    }
                    continue;
                }
                if segments_intersect(edges[i].0, edges[i].1, edges[j].0, edges[j].1) {
                    return Err("self-intersecting boundary".into());
                }
            }
        }
        for hole in &self.holes {
            let outer = Polygon::new(self.exterior.clone(), Vec::new());
            if !hole.iter().all(|&p| outer.contains(p)) {
                return Err("hole lies outside the exterior ring".into());
            }
        }
        Ok(())
    }

    fn ring_offsets(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for ring in self.rings() {
            out.push((start, ring.len()));
            start += ring.len();
        }
        out
    }

    /// Copy with counter-clockwise exterior and clockwise holes.
    pub fn normalized(&self) -> Self {
        let mut exterior = self.exterior.clone();
        if ring_signed_area2(&exterior) < 0.0 {
            exterior.reverse();
        }
        let holes = self
            .holes
            .iter()
            .map(|h| {
                let mut h = h.clone();
                if ring_signed_area2(&h) > 0.0 {
                    h.reverse();
                }
                h
            })
            .collect();
        Self { exterior, holes }
    }
}

fn adjacent_in_ring(i: usize, j: usize, rings: &[(usize, usize)]) -> bool {
    for &(start, len) in rings {
        let inside = |k: usize| k >= start && k < start + len;
        if inside(i) && inside(j) {
            let (a, b) = (i - start, j - start);
            return b == a + 1 || (a == 0 && b == len - 1);
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_area_centroid() {
        let p = Polygon::rectangle(0.0, 0.0, 20.0, 10.0);
        assert_eq!(p.area(), 200.0);
        assert_eq!(p.centroid(), [10.0, 5.0]);
        assert_eq!(p.perimeter(), 60.0);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn bow_tie_is_rejected() {
        let p = Polygon::new(vec![[0.0, 0.0], [10.0, 10.0], [10.0, 0.0], [0.0, 10.0]], vec![]);
        assert!(p.validate().is_err());
    }

    #[test]
    fn hole_reduces_area_and_keeps_centroid() {
        let p = Polygon::new(
            vec![[0.0, 0.0], [10.0, 0.0], [10.0, 10.0], [0.0, 10.0]],
            vec![vec![[4.0, 4.0], [6.0, 4.0], [6.0, 6.0], [4.0, 6.0]]],
        );
        assert_eq!(p.area(), 96.0);
        let c = p.centroid();
        assert!((c[0] - 5.0).abs() < 1e-12 && (c[1] - 5.0).abs() < 1e-12);
        assert!(!p.contains([5.0, 5.0]));
        assert!(p.contains([1.0, 1.0]));
        assert!(p.validate().is_ok());
    }

    #[test]
    fn normalization_orients_rings() {
        let p = Polygon::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]], vec![]).normalized();
        assert!(ring_signed_area2(&p.exterior) > 0.0);
    }

    #[test]
    fn closing_vertex_is_dropped() {
        let p = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 0.0]], vec![]);
        assert_eq!(p.exterior.len(), 3);
    }

    #[test]
    fn spike_is_rejected() {
        let p = Polygon::new(vec![[0.0, 0.0], [10.0, 0.0], [5.0, 0.0], [5.0, 5.0]], vec![]);
        assert!(p.validate().is_err());
    }
}
