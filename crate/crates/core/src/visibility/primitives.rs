//! Exact ray/primitive intersection shared by the accelerated tracer and the
//! brute-force reference tracer. Both select among the same hits with the
//! same ordering, so their results agree bit for bit.

use crate::citymodel::{Building, CityModel, GableFrame, Point2, Roof};

use super::Category;

#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: [f64; 3],
    pub dir: [f64; 3],
}

/// Kind of surface struck. The discriminant is the tie priority at equal
/// distance: façade, then roof, then vegetation, then bare terrain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Surface {
    Facade,
    Roof,
    Vegetation,
    Terrain(Category),
}

impl Surface {
    pub fn category(self) -> Category {
        match self {
            Surface::Facade => Category::Facade,
            Surface::Roof => Category::Roof,
            Surface::Vegetation => Category::Vegetation,
            Surface::Terrain(c) => c,
        }
    }

    fn priority(self) -> u8 {
        match self {
            Surface::Facade => 0,
            Surface::Roof => 1,
            Surface::Vegetation => 2,
            Surface::Terrain(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub surface: Surface,
    /// Buildings first in model order, then terrain cells in raster order.
    pub primitive: usize,
}

impl Hit {
    /// Total order used to pick the visible hit: distance, then surface
    /// priority, then primitive index.
    pub fn beats(&self, other: &Hit) -> bool {
        (self.t, self.surface.priority(), self.primitive) < (other.t, other.surface.priority(), other.primitive)
    }
}

pub(crate) fn keep_best(best: &mut Option<Hit>, candidate: Hit) {
    match best {
        Some(b) if !candidate.beats(b) => {}
        _ => *best = Some(candidate),
    }
}

/// Parametric interval of the ray inside an axis-aligned box. Bounds may be
/// infinite.
pub fn slab(ray: &Ray, lo: [f64; 3], hi: [f64; 3]) -> Option<(f64, f64)> {
    let mut tmin = f64::NEG_INFINITY;
    let mut tmax = f64::INFINITY;
    for axis in 0..3 {
        let o = ray.origin[axis];
        let d = ray.dir[axis];
        if d == 0.0 {
            if o < lo[axis] || o > hi[axis] {
                return None;
            }
            continue;
        }
        let t1 = (lo[axis] - o) / d;
        let t2 = (hi[axis] - o) / d;
        let (a, b) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        if a > tmin {
            tmin = a;
        }
        if b < tmax {
            tmax = b;
        }
        if tmin > tmax {
            return None;
        }
    }
    Some((tmin, tmax))
}

/// A building prepared for intersection.
#[derive(Debug, Clone)]
pub struct BuildingPrim {
    pub index: usize,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    building: Building,
    edges: Vec<(Point2, Point2)>,
    gable: Option<GableFrame>,
}

impl BuildingPrim {
    pub fn new(index: usize, building: &Building) -> Self {
        let bb = building.footprint.bbox();
        Self {
            index,
            lo: [bb[0], bb[2], building.ground_elevation],
            hi: [bb[1], bb[3], building.top_z()],
            edges: building.footprint.edges().collect(),
            gable: building.gable_frame(),
            building: building.clone(),
        }
    }

    pub fn all(city: &CityModel) -> Vec<BuildingPrim> {
        city.buildings()
            .iter()
            .enumerate()
            .map(|(i, b)| BuildingPrim::new(i, b))
            .collect()
    }

    fn consider(best: &mut Option<(f64, Surface)>, t: f64, s: Surface) {
        match best {
            Some((bt, bs)) if (*bt, *bs) <= (t, s) => {}
            _ => *best = Some((t, s)),
        }
    }

    /// Nearest intersection with walls and roof, façade winning ties.
    pub fn intersect(&self, ray: &Ray) -> Option<Hit> {
        let b = &self.building;
        let [ox, oy, oz] = ray.origin;
        let [dx, dy, dz] = ray.dir;
        let mut best: Option<(f64, Surface)> = None;

        for &(a, e_end) in &self.edges {
            let ex = e_end[0] - a[0];
            let ey = e_end[1] - a[1];
            let denom = dx * ey - dy * ex;
            if denom == 0.0 {
                continue;
            }
            let wx = a[0] - ox;
            let wy = a[1] - oy;
            let t = (wx * ey - ex * wy) / denom;
            let u = (wx * dy - dx * wy) / denom;
            if t < 0.0 || !(0.0..=1.0).contains(&u) {
                continue;
            }
            let z = oz + t * dz;
            if z < b.ground_elevation {
                continue;
            }
            let top = match self.gable {
                Some(_) => b.top_at([a[0] + u * ex, a[1] + u * ey]),
                None => b.eave_z(),
            };
            if z <= top {
                Self::consider(&mut best, t, Surface::Facade);
            }
        }

        match (b.roof, self.gable) {
            (Roof::Gabled { ridge_height, .. }, Some(f)) if f.half_width > 0.0 => {
                let k = (ridge_height - b.eave_height) / f.half_width;
                let ridge_z = b.ground_elevation + ridge_height;
                let u_o = f.across[0] * ox + f.across[1] * oy;
                let u_d = f.across[0] * dx + f.across[1] * dy;
                for side in [1.0, -1.0] {
                    let coef = dz + k * side * u_d;
                    if coef == 0.0 {
                        continue;
                    }
                    let t = (ridge_z - k * side * (u_o - f.ridge_u) - oz) / coef;
                    if t < 0.0 {
                        continue;
                    }
                    let u = u_o + t * u_d;
                    if side * (u - f.ridge_u) < 0.0 {
                        continue;
                    }
                    if b.footprint.contains([ox + t * dx, oy + t * dy]) {
                        Self::consider(&mut best, t, Surface::Roof);
                    }
                }
            }
            _ => {
                if dz != 0.0 {
                    let t = (b.eave_z() - oz) / dz;
                    if t >= 0.0 && b.footprint.contains([ox + t * dx, oy + t * dy]) {
                        Self::consider(&mut best, t, Surface::Roof);
                    }
                }
            }
        }

        best.map(|(t, surface)| Hit {
            t,
            surface,
            primitive: self.index,
        })
    }
}

/// Terrain and canopy as flat-topped cell columns. Each data cell is a box
/// from -inf up to terrain + canopy height.
#[derive(Debug, Clone)]
pub struct TerrainCells {
    pub ncols: usize,
    pub nrows: usize,
    /// Offset added to cell indices in [`Hit::primitive`].
    pub primitive_offset: usize,
    bounds: Vec<[f64; 4]>,
    ground: Vec<f64>,
    top: Vec<f64>,
    category: Vec<Category>,
}

impl TerrainCells {
    pub fn new(city: &CityModel) -> Self {
        let layout = *city.layout();
        let n = layout.len();
        let mut bounds = Vec::with_capacity(n);
        let mut ground = Vec::with_capacity(n);
        let mut top = Vec::with_capacity(n);
        let mut category = Vec::with_capacity(n);
        for r in 0..layout.nrows {
            for c in 0..layout.ncols {
                bounds.push(layout.cell_bounds(r, c));
                let g = city.terrain().elevation(r, c).unwrap_or(f64::NAN);
                ground.push(g);
                top.push(g + city.canopy().height(r, c));
                category.push(city.landcover().category(r, c));
            }
        }
        Self {
            ncols: layout.ncols,
            nrows: layout.nrows,
            primitive_offset: city.len(),
            bounds,
            ground,
            top,
            category,
        }
    }

    pub fn len(&self) -> usize {
        self.top.len()
    }

    pub fn is_empty(&self) -> bool {
        self.top.is_empty()
    }

    /// Planar bounds `[x0, x1, y0, y1]` of a cell by flat index.
    pub fn bounds(&self, cell: usize) -> [f64; 4] {
        self.bounds[cell]
    }

    /// Column top, NaN for nodata.
    pub fn top(&self, cell: usize) -> f64 {
        self.top[cell]
    }

    pub fn intersect(&self, cell: usize, ray: &Ray) -> Option<Hit> {
        let top = self.top[cell];
        if top.is_nan() {
            return None;
        }
        let [x0, x1, y0, y1] = self.bounds[cell];
        let (tmin, tmax) = slab(ray, [x0, y0, f64::NEG_INFINITY], [x1, y1, top])?;
        let t = tmin.max(0.0);
        if tmax < t {
            return None;
        }
        let z = ray.origin[2] + t * ray.dir[2];
        let surface = if top > self.ground[cell] && z > self.ground[cell] {
            Surface::Vegetation
        } else {
            Surface::Terrain(self.category[cell])
        };
        Some(Hit {
            t,
            surface,
            primitive: self.primitive_offset + cell,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::citymodel::Polygon;

    fn ray(o: [f64; 3], d: [f64; 3]) -> Ray {
        let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        Ray {
            origin: o,
            dir: [d[0] / n, d[1] / n, d[2] / n],
        }
    }

    fn cube() -> BuildingPrim {
        let b = Building::new("c", Polygon::rectangle(10.0, -5.0, 20.0, 5.0), 0.0, 10.0, Roof::Flat).unwrap();
        BuildingPrim::new(0, &b)
    }

    #[test]
    fn wall_hit_distance() {
        let h = cube().intersect(&ray([0.0, 0.0, 5.0], [1.0, 0.0, 0.0])).unwrap();
        assert_eq!(h.t, 10.0);
        assert_eq!(h.surface, Surface::Facade);
    }

    #[test]
    fn roof_hit_from_above() {
        let h = cube().intersect(&ray([15.0, 0.0, 30.0], [0.0, 0.0, -1.0])).unwrap();
        assert_eq!(h.t, 20.0);
        assert_eq!(h.surface, Surface::Roof);
    }

    #[test]
    fn passes_over_the_roof() {
        assert!(cube().intersect(&ray([0.0, 0.0, 11.0], [1.0, 0.0, 0.0])).is_none());
    }

    #[test]
    fn gable_end_wall_is_facade() {
        let b = Building::new(
            "g",
            Polygon::rectangle(10.0, -5.0, 20.0, 5.0),
            0.0,
            6.0,
            Roof::Gabled {
                ridge_height: 10.0,
                ridge_axis: 0.0,
            },
        )
        .unwrap();
        let prim = BuildingPrim::new(0, &b);
        // end wall (x = 10) rises to the ridge at y = 0
        let h = prim.intersect(&ray([0.0, 0.0, 9.0], [1.0, 0.0, 0.0])).unwrap();
        assert_eq!(h.surface, Surface::Facade);
        // above the eave near the side wall the ray meets the roof slope
        let h = prim.intersect(&ray([15.0, -20.0, 7.0], [0.0, 1.0, 0.0])).unwrap();
        assert_eq!(h.surface, Surface::Roof);
        assert!((h.t - 16.25).abs() < 1e-12);
    }

    #[test]
    fn slab_handles_axis_parallel_rays() {
        let r = ray([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        assert_eq!(slab(&r, [1.0, -1.0, -1.0], [2.0, 1.0, 1.0]), Some((1.0, 2.0)));
        assert_eq!(slab(&r, [1.0, 0.5, -1.0], [2.0, 1.0, 1.0]), None);
    }

    #[test]
    fn priority_breaks_ties() {
        let a = Hit {
            t: 1.0,
            surface: Surface::Facade,
            primitive: 9,
        };
        let b = Hit {
            t: 1.0,
            surface: Surface::Terrain(Category::Grass),
            primitive: 0,
        };
        assert!(a.beats(&b));
        assert!(!b.beats(&a));
    }
}
