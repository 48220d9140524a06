//! The 3D city model: terrain, canopy and landcover rasters plus extruded
//! buildings, and the edits that turn a reference model into design
//! alternatives.

mod building;
pub mod geometry;
mod grid;
pub mod io;
pub mod joint;

use std::collections::HashSet;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use building::{Building, GableFrame, Roof};
pub use geometry::{Point2, Polygon};
pub use grid::{CanopyGrid, GridLayout, LandcoverGrid, Raster, TerrainGrid};
pub use joint::SNAP_TOLERANCE;

use crate::{Error, Result};

/// Height added per floor by [`ScenarioEdit::AddFloors`], metres.
pub const DEFAULT_FLOOR_INCREMENT: f64 = 5.0;

/// Label of the as-built model.
pub const REFERENCE_SCENARIO: &str = "ref";

/// A design change applied to a city model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScenarioEdit {
    AddFloors {
        building_id: String,
        n_floors: u32,
    },
    ReplaceMassing {
        removed_ids: Vec<String>,
        added: Vec<Building>,
    },
}

/// Immutable scene shared by every simulation. Edits return new models; the
/// rasters are shared between a model and its edits.
#[derive(Debug, Clone)]
pub struct CityModel {
    terrain: Arc<TerrainGrid>,
    canopy: Arc<CanopyGrid>,
    landcover: Arc<LandcoverGrid>,
    buildings: Vec<Building>,
    scenario_id: String,
    hash: OnceLock<String>,
}

impl CityModel {
    /// Assembles and validates a reference model. Joint groups are computed
    /// from shared walls.
    pub fn new(
        terrain: TerrainGrid,
        canopy: CanopyGrid,
        landcover: LandcoverGrid,
        buildings: Vec<Building>,
    ) -> Result<Self> {
        let layout = *terrain.layout();
        for (name, other) in [("canopy", canopy.layout()), ("landcover", landcover.layout())] {
            if *other != layout {
                return Err(Error::MisalignedGrids(format!(
                    "{name} layout {other:?} differs from terrain layout {layout:?}"
                )));
            }
        }
        let mut city = Self {
            terrain: Arc::new(terrain),
            canopy: Arc::new(canopy),
            landcover: Arc::new(landcover),
            buildings: Vec::new(),
            scenario_id: REFERENCE_SCENARIO.to_string(),
            hash: OnceLock::new(),
        };
        let mut buildings = buildings;
        for b in &mut buildings {
            b.footprint = b.footprint.normalized();
            b.validate()?;
            city.check_inside(b)?;
        }
        let mut seen = HashSet::new();
        for b in &buildings {
            if !seen.insert(b.id.as_str()) {
                return Err(Error::InvalidBuilding {
                    id: b.id.clone(),
                    reason: "duplicate id".into(),
                });
            }
        }
        joint::assign_joint_groups(&mut buildings, SNAP_TOLERANCE);
        city.buildings = buildings;
        Ok(city)
    }

    fn check_inside(&self, b: &Building) -> Result<()> {
        let layout = self.terrain.layout();
        if b.footprint.exterior.iter().all(|p| layout.contains(p[0], p[1])) {
            Ok(())
        } else {
            Err(Error::InvalidBuilding {
                id: b.id.clone(),
                reason: "footprint extends beyond the terrain extent".into(),
            })
        }
    }

    pub fn terrain(&self) -> &TerrainGrid {
        &self.terrain
    }

    pub fn canopy(&self) -> &CanopyGrid {
        &self.canopy
    }

    pub fn landcover(&self) -> &LandcoverGrid {
        &self.landcover
    }

    pub fn layout(&self) -> &GridLayout {
        self.terrain.layout()
    }

    pub fn buildings(&self) -> &[Building] {
        &self.buildings
    }

    pub fn len(&self) -> usize {
        self.buildings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buildings.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.buildings.iter().position(|b| b.id == id)
    }

    pub fn building(&self, id: &str) -> Result<&Building> {
        self.buildings
            .iter()
            .find(|b| b.id == id)
            .ok_or_else(|| Error::UnknownBuilding(id.to_string()))
    }

    pub fn scenario_id(&self) -> &str {
        &self.scenario_id
    }

    pub fn with_scenario_id(mut self, id: impl Into<String>) -> Self {
        self.scenario_id = id.into();
        self
    }

    pub fn total_footprint_area(&self) -> f64 {
        self.buildings.iter().map(|b| b.footprint.area()).sum()
    }

    /// SHA-256 over the buildings and rasters; independent of the scenario
    /// label.
    pub fn content_hash(&self) -> &str {
        self.hash.get_or_init(|| {
            let mut h = Sha256::new();
            h.update(serde_json::to_vec(&self.buildings).expect("buildings serialize"));
            for raster in [&self.terrain.0, &self.canopy.0, &self.landcover.0] {
                h.update(serde_json::to_vec(&raster.layout).expect("layout serializes"));
                for v in raster.values() {
                    h.update(v.to_le_bytes());
                }
            }
            hex::encode(h.finalize())
        })
    }

    /// Recomputes joint groups. Buildings whose footprints share a wall
    /// segment end up with a common group label.
    pub fn merge_joint_structures(&self) -> CityModel {
        let mut out = self.derived(self.buildings.clone());
        joint::assign_joint_groups(&mut out.buildings, SNAP_TOLERANCE);
        out
    }

    pub fn apply_edit(&self, edit: &ScenarioEdit) -> Result<CityModel> {
        self.apply_edit_with(edit, DEFAULT_FLOOR_INCREMENT)
    }

    /// Applies an edit with a custom floor increment. The receiver is left
    /// untouched; the result carries the scenario label `"alt"`.
    pub fn apply_edit_with(&self, edit: &ScenarioEdit, floor_increment: f64) -> Result<CityModel> {
        match edit {
            ScenarioEdit::AddFloors { building_id, n_floors } => {
                if *n_floors < 1 {
                    return Err(Error::InvalidEdit("n_floors must be at least 1".into()));
                }
                if !(floor_increment > 0.0) {
                    return Err(Error::InvalidEdit("floor increment must be positive".into()));
                }
                let idx = self
                    .index_of(building_id)
                    .ok_or_else(|| Error::UnknownBuilding(building_id.clone()))?;
                let mut buildings = self.buildings.clone();
                buildings[idx].raise(*n_floors as f64 * floor_increment);
                Ok(self.derived(buildings))
            }
            ScenarioEdit::ReplaceMassing { removed_ids, added } => {
                for id in removed_ids {
                    self.building(id)?;
                }
                let removed: HashSet<&str> = removed_ids.iter().map(String::as_str).collect();
                let mut buildings: Vec<Building> = self
                    .buildings
                    .iter()
                    .filter(|b| !removed.contains(b.id.as_str()))
                    .cloned()
                    .collect();
                let mut ids: HashSet<String> = buildings.iter().map(|b| b.id.clone()).collect();
                for b in added {
                    let mut b = b.clone();
                    b.footprint = b.footprint.normalized();
                    b.joint_group = b.id.clone();
                    b.validate()?;
                    self.check_inside(&b)?;
                    if !ids.insert(b.id.clone()) {
                        return Err(Error::InvalidEdit(format!("added building id {} already exists", b.id)));
                    }
                    buildings.push(b);
                }
                let mut out = self.derived(buildings);
                joint::assign_joint_groups(&mut out.buildings, SNAP_TOLERANCE);
                Ok(out)
            }
        }
    }

    fn derived(&self, buildings: Vec<Building>) -> CityModel {
        CityModel {
            terrain: Arc::clone(&self.terrain),
            canopy: Arc::clone(&self.canopy),
            landcover: Arc::clone(&self.landcover),
            buildings,
            scenario_id: "alt".to_string(),
            hash: OnceLock::new(),
        }
    }
}

/// Loads the four input files and assembles a validated reference model.
pub fn load_city(
    terrain_path: impl AsRef<Path>,
    buildings_path: impl AsRef<Path>,
    canopy_path: Option<&Path>,
    landcover_path: Option<&Path>,
) -> Result<CityModel> {
    let terrain = TerrainGrid::new(Raster::read_asc(terrain_path)?)?;
    let layout = *terrain.layout();
    let canopy = match canopy_path {
        Some(p) => CanopyGrid::new(Raster::read_asc(p)?)?,
        None => CanopyGrid::empty(layout),
    };
    let landcover = match landcover_path {
        Some(p) => LandcoverGrid::new(Raster::read_asc(p)?)?,
        None => LandcoverGrid::uniform(layout, crate::visibility::Category::Grass),
    };
    let buildings = io::read_buildings(buildings_path)?;
    CityModel::new(terrain, canopy, landcover, buildings)
}
