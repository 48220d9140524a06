//! Detection of buildings that share walls.

use super::building::Building;
use super::geometry::Point2;

/// Snap tolerance for shared walls, metres.
pub const SNAP_TOLERANCE: f64 = 0.05;

/// Portion of segment `a` covered by segment `b`, as an arc-length interval
/// along `a`. `None` unless the two are collinear within `tol` and overlap by
/// more than `tol`.
pub fn shared_interval(a: (Point2, Point2), b: (Point2, Point2), tol: f64) -> Option<(f64, f64)> {
    let dx = a.1[0] - a.0[0];
    let dy = a.1[1] - a.0[1];
    let len = dx.hypot(dy);
    if len == 0.0 {
        return None;
    }
    let (ux, uy) = (dx / len, dy / len);
    let off = |p: Point2| -> (f64, f64) {
        let rx = p[0] - a.0[0];
        let ry = p[1] - a.0[1];
        (rx * ux + ry * uy, (rx * uy - ry * ux).abs())
    };
    let (s0, d0) = off(b.0);
    let (s1, d1) = off(b.1);
    if d0 > tol || d1 > tol {
        return None;
    }
    let lo = s0.min(s1).max(0.0);
    let hi = s0.max(s1).min(len);
    (hi - lo > tol).then_some((lo, hi))
}

fn bboxes_touch(a: &[f64; 4], b: &[f64; 4], tol: f64) -> bool {
    a[0] <= b[1] + tol && b[0] <= a[1] + tol && a[2] <= b[3] + tol && b[2] <= a[3] + tol
}

/// Whether two buildings share a boundary segment of positive length.
pub fn share_wall(a: &Building, b: &Building, tol: f64) -> bool {
    if !bboxes_touch(&a.footprint.bbox(), &b.footprint.bbox(), tol) {
        return false;
    }
    a.footprint
        .edges()
        .any(|ea| b.footprint.edges().any(|eb| shared_interval(ea, eb, tol).is_some()))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = i;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Assigns every building the smallest id of its connected wall-sharing
/// component.
pub(crate) fn assign_joint_groups(buildings: &mut [Building], tol: f64) {
    let n = buildings.len();
    let mut uf = UnionFind((0..n).collect());
    let boxes: Vec<[f64; 4]> = buildings.iter().map(|b| b.footprint.bbox()).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if bboxes_touch(&boxes[i], &boxes[j], tol) && share_wall(&buildings[i], &buildings[j], tol) {
                uf.union(i, j);
            }
        }
    }
    let mut label: Vec<Option<String>> = vec![None; n];
    for (i, b) in buildings.iter().enumerate() {
        let root = uf.find(i);
        let id = &b.id;
        match &label[root] {
            Some(l) if l <= id => {}
            _ => label[root] = Some(id.clone()),
        }
    }
    for (i, b) in buildings.iter_mut().enumerate() {
        b.joint_group = label[uf.find(i)].clone().expect("root labelled");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_overlap() {
        let a = ([0.0, 0.0], [10.0, 0.0]);
        let b = ([12.0, 0.0], [4.0, 0.0]);
        assert_eq!(shared_interval(a, b, 0.05), Some((4.0, 10.0)));
    }

    #[test]
    fn point_contact_is_not_shared() {
        let a = ([0.0, 0.0], [10.0, 0.0]);
        let b = ([10.0, 0.0], [20.0, 0.0]);
        assert_eq!(shared_interval(a, b, 0.05), None);
        let c = ([10.0, 0.0], [10.0, 5.0]);
        assert_eq!(shared_interval(a, c, 0.05), None);
    }

    #[test]
    fn noisy_wall_within_tolerance() {
        let a = ([0.0, 0.0], [10.0, 0.0]);
        let b = ([10.0, 0.03], [0.0, 0.02]);
        assert!(shared_interval(a, b, 0.05).is_some());
        let far = ([10.0, 0.3], [0.0, 0.3]);
        assert!(shared_interval(a, far, 0.05).is_none());
    }
}
