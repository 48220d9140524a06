use crate::citymodel::CityModel;

use super::bvh::Bvh;
use super::heightfield::Heightfield;
use super::primitives::{BuildingPrim, Hit, Ray, TerrainCells};

/// A city model prepared for ray casting.
#[derive(Debug, Clone)]
pub struct Scene {
    city: CityModel,
    buildings: Bvh,
    terrain: Heightfield,
}

impl Scene {
    pub fn new(city: &CityModel) -> Self {
        Self {
            city: city.clone(),
            buildings: Bvh::new(BuildingPrim::all(city)),
            terrain: Heightfield::new(TerrainCells::new(city)),
        }
    }

    pub fn city(&self) -> &CityModel {
        &self.city
    }

    /// Visible hit within `max_range`, or `None` for sky.
    pub fn trace(&self, ray: &Ray, max_range: f64) -> Option<Hit> {
        let mut best = None;
        self.buildings.trace(ray, max_range, &mut best);
        self.terrain.trace(ray, max_range, &mut best);
        best
    }
}
