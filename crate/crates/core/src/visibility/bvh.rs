//! Binary bounding volume hierarchy over building primitives.

use super::primitives::{keep_best, slab, BuildingPrim, Hit, Ray};

/// Boxes are grown by this much (plus a relative term) so that culling can
/// never discard a primitive the exact test would hit.
const PAD: f64 = 1e-6;

fn pad(v: f64, up: bool) -> f64 {
    let m = PAD + v.abs() * 1e-12;
    if up {
        v + m
    } else {
        v - m
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        lo: [f64; 3],
        hi: [f64; 3],
        prims: Vec<usize>,
    },
    Inner {
        lo: [f64; 3],
        hi: [f64; 3],
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        match self {
            Node::Leaf { lo, hi, .. } | Node::Inner { lo, hi, .. } => (*lo, *hi),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Bvh {
    prims: Vec<BuildingPrim>,
    root: Option<Node>,
}

const LEAF_SIZE: usize = 2;

impl Bvh {
    pub fn new(prims: Vec<BuildingPrim>) -> Self {
        let mut order: Vec<usize> = (0..prims.len()).collect();
        let root = (!prims.is_empty()).then(|| build(&prims, &mut order));
        Self { prims, root }
    }

    /// Nearest building hit with `t <= limit`.
    pub fn trace(&self, ray: &Ray, limit: f64, best: &mut Option<Hit>) {
        if let Some(root) = &self.root {
            self.visit(root, ray, limit, best);
        }
    }

    fn visit(&self, node: &Node, ray: &Ray, limit: f64, best: &mut Option<Hit>) {
        let (lo, hi) = node.bounds();
        let Some((t0, t1)) = slab(ray, lo, hi) else {
            return;
        };
        let bound = best.map_or(limit, |b| b.t.min(limit));
        if t1 < 0.0 || t0 > bound {
            return;
        }
        match node {
            Node::Leaf { prims, .. } => {
                for &i in prims {
                    if let Some(hit) = self.prims[i].intersect(ray) {
                        if hit.t <= limit {
                            keep_best(best, hit);
                        }
                    }
                }
            }
            Node::Inner { left, right, .. } => {
                self.visit(left, ray, limit, best);
                self.visit(right, ray, limit, best);
            }
        }
    }
}

fn enclose(prims: &[BuildingPrim], idx: &[usize]) -> ([f64; 3], [f64; 3]) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &i in idx {
        for a in 0..3 {
            lo[a] = lo[a].min(prims[i].lo[a]);
            hi[a] = hi[a].max(prims[i].hi[a]);
        }
    }
    (lo.map(|v| pad(v, false)), hi.map(|v| pad(v, true)))
}

fn build(prims: &[BuildingPrim], idx: &mut [usize]) -> Node {
    let (lo, hi) = enclose(prims, idx);
    if idx.len() <= LEAF_SIZE {
        return Node::Leaf {
            lo,
            hi,
            prims: idx.to_vec(),
        };
    }
    let centre = |i: usize, a: usize| (prims[i].lo[a] + prims[i].hi[a]) / 2.0;
    let mut clo = [f64::INFINITY; 3];
    let mut chi = [f64::NEG_INFINITY; 3];
    for &i in idx.iter() {
        for a in 0..3 {
            clo[a] = clo[a].min(centre(i, a));
            chi[a] = chi[a].max(centre(i, a));
        }
    }
    let axis = (0..3)
        .max_by(|&a, &b| (chi[a] - clo[a]).total_cmp(&(chi[b] - clo[b])))
        .unwrap_or(0);
    idx.sort_by(|&a, &b| centre(a, axis).total_cmp(&centre(b, axis)).then(a.cmp(&b)));
    let mid = idx.len() / 2;
    let (l, r) = idx.split_at_mut(mid);
    Node::Inner {
        lo,
        hi,
        left: Box::new(build(prims, l)),
        right: Box::new(build(prims, r)),
    }
}
