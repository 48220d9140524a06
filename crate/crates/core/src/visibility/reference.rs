//! Brute-force tracer: every ray is tested against every building and every
//! terrain cell, with no acceleration structure. Slow; used to check the
//! accelerated [`Scene`](super::Scene).

use crate::citymodel::CityModel;

use super::primitives::{keep_best, BuildingPrim, Hit, Ray, TerrainCells};
use super::tensor::HitCounts;
use super::{RayConfig, Viewpoint};

pub struct ReferenceTracer {
    buildings: Vec<BuildingPrim>,
    cells: TerrainCells,
}

impl ReferenceTracer {
    pub fn new(city: &CityModel) -> Self {
        Self {
            buildings: BuildingPrim::all(city),
            cells: TerrainCells::new(city),
        }
    }

    pub fn trace(&self, ray: &Ray, max_range: f64) -> Option<Hit> {
        let mut best = None;
        let hits = self
            .buildings
            .iter()
            .filter_map(|b| b.intersect(ray))
            .chain((0..self.cells.len()).filter_map(|c| self.cells.intersect(c, ray)));
        for hit in hits {
            if hit.t <= max_range {
                keep_best(&mut best, hit);
            }
        }
        best
    }

    pub fn cast_cone(&self, viewpoint: &Viewpoint, config: &RayConfig) -> HitCounts {
        HitCounts::from_hits(config.directions(viewpoint.normal).into_iter().map(|dir| {
            self.trace(
                &Ray {
                    origin: viewpoint.position,
                    dir,
                },
                config.max_range,
            )
        }))
    }
}
