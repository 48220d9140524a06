//! Maximum-height quadtree over terrain cell columns.
//!
//! Level 0 holds the column tops; each higher level stores the maximum of a
//! 2x2 block below it. A ray descends only into blocks whose padded bounding
//! box it enters before the current best hit.

use super::primitives::{keep_best, slab, Hit, Ray, TerrainCells};

const PAD: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Heightfield {
    cells: TerrainCells,
    /// `levels[k]` is a `rows_k x cols_k` grid of block maxima.
    levels: Vec<Level>,
}

#[derive(Debug, Clone)]
struct Level {
    rows: usize,
    cols: usize,
    max: Vec<f64>,
}

impl Heightfield {
    pub fn new(cells: TerrainCells) -> Self {
        let mut levels = vec![Level {
            rows: cells.nrows,
            cols: cells.ncols,
            max: (0..cells.len())
                .map(|i| {
                    let t = cells.top(i);
                    if t.is_nan() {
                        f64::NEG_INFINITY
                    } else {
                        t
                    }
                })
                .collect(),
        }];
        while {
            let last = levels.last().unwrap();
            last.rows > 1 || last.cols > 1
        } {
            let prev = levels.last().unwrap();
            let rows = prev.rows.div_ceil(2);
            let cols = prev.cols.div_ceil(2);
            let mut max = vec![f64::NEG_INFINITY; rows * cols];
            for r in 0..prev.rows {
                for c in 0..prev.cols {
                    let m = &mut max[(r / 2) * cols + c / 2];
                    *m = m.max(prev.max[r * prev.cols + c]);
                }
            }
            levels.push(Level { rows, cols, max });
        }
        Self { cells, levels }
    }

    pub fn trace(&self, ray: &Ray, limit: f64, best: &mut Option<Hit>) {
        let top = self.levels.len() - 1;
        self.visit(top, 0, 0, ray, limit, best);
    }

    fn block_box(&self, level: usize, r: usize, c: usize) -> ([f64; 3], [f64; 3]) {
        let span = 1usize << level;
        let r0 = r * span;
        let c0 = c * span;
        let r1 = ((r + 1) * span).min(self.cells.nrows) - 1;
        let c1 = ((c + 1) * span).min(self.cells.ncols) - 1;
        // r0 is the northern edge, r1 the southern
        let nw = self.cells.bounds(r0 * self.cells.ncols + c0);
        let se = self.cells.bounds(r1 * self.cells.ncols + c1);
        let zmax = self.levels[level].max[r * self.levels[level].cols + c];
        let p = |v: f64| PAD + v.abs() * 1e-12;
        (
            [nw[0] - p(nw[0]), se[2] - p(se[2]), f64::NEG_INFINITY],
            [se[1] + p(se[1]), nw[3] + p(nw[3]), zmax + p(zmax)],
        )
    }

    fn visit(&self, level: usize, r: usize, c: usize, ray: &Ray, limit: f64, best: &mut Option<Hit>) {
        if self.levels[level].max[r * self.levels[level].cols + c] == f64::NEG_INFINITY {
            return;
        }
        if level == 0 {
            if let Some(hit) = self.cells.intersect(r * self.cells.ncols + c, ray) {
                if hit.t <= limit {
                    keep_best(best, hit);
                }
            }
            return;
        }
        let (lo, hi) = self.block_box(level, r, c);
        let Some((t0, t1)) = slab(ray, lo, hi) else {
            return;
        };
        let bound = best.map_or(limit, |b| b.t.min(limit));
        if t1 < 0.0 || t0 > bound {
            return;
        }
        let below = &self.levels[level - 1];
        let mut children: [(f64, usize, usize); 4] = [(f64::INFINITY, usize::MAX, usize::MAX); 4];
        let mut n = 0;
        for cr in [2 * r, 2 * r + 1] {
            for cc in [2 * c, 2 * c + 1] {
                if cr < below.rows && cc < below.cols {
                    let entry = if level - 1 == 0 {
                        0.0
                    } else {
                        let (lo, hi) = self.block_box(level - 1, cr, cc);
                        match slab(ray, lo, hi) {
                            Some((a, _)) => a,
                            None => continue,
                        }
                    };
                    children[n] = (entry, cr, cc);
                    n += 1;
                }
            }
        }
        let children = &mut children[..n];
        children.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(entry, cr, cc) in children.iter() {
            let bound = best.map_or(limit, |b| b.t.min(limit));
            if entry > bound {
                break;
            }
            self.visit(level - 1, cr, cc, ray, limit, best);
        }
    }
}
