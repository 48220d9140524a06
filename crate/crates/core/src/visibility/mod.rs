//! Viewpoint visual-share simulation.
//!
//! Viewpoints sit on exterior façades; from each one a cone of rays is cast
//! and every ray is classified by what it hits first (landcover category)
//! and how far away (distance bin). Counts are integers and rays are traced
//! in a fixed order, so results do not depend on the number of workers.

mod bvh;
mod category;
mod heightfield;
pub mod primitives;
mod rays;
pub mod reference;
mod scene;
mod tensor;
mod viewpoint;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use category::{category_registry, Category, CategoryEntry, CATEGORY_REGISTRY_JSON, N_CATEGORIES};
pub use primitives::{Hit, Ray, Surface};
pub use rays::{bin_range, distance_bin, RayConfig, BIN_EDGES, N_BINS};
pub use reference::ReferenceTracer;
pub use scene::Scene;
pub use tensor::{visual_share_csv, HitCounts, VisualShareTensor, VISUAL_SHARE_CSV_HEADER};
pub use viewpoint::{
    generate_viewpoints, level_heights, stretch_positions, Viewpoint, ViewpointConfig, FACADE_OFFSET,
    FIRST_LEVEL_HEIGHT,
};

use crate::{Error, Result};

/// Ray cone and viewpoint placement together.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    pub rays: RayConfig,
    pub viewpoints: ViewpointConfig,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.rays.validate()?;
        self.viewpoints.validate()
    }
}

/// Casts the view cone of one viewpoint and tallies hits.
pub fn cast_cone(scene: &Scene, viewpoint: &Viewpoint, config: &RayConfig) -> HitCounts {
    HitCounts::from_hits(config.directions(viewpoint.normal).into_iter().map(|dir| {
        scene.trace(
            &Ray {
                origin: viewpoint.position,
                dir,
            },
            config.max_range,
        )
    }))
}

/// Runs the visual-share simulation for one building. Viewpoints are traced
/// in parallel on the current rayon pool and collected in viewpoint order.
pub fn visual_share(scene: &Scene, building_id: &str, config: &SimulationConfig) -> Result<VisualShareTensor> {
    config.validate()?;
    let viewpoints = generate_viewpoints(scene.city(), building_id, &config.viewpoints)?;
    if viewpoints.is_empty() {
        return Err(Error::NoViewpoints(building_id.to_string()));
    }
    let counts = viewpoints
        .par_iter()
        .map(|vp| cast_cone(scene, vp, &config.rays))
        .collect();
    Ok(VisualShareTensor {
        building_id: building_id.to_string(),
        n_rays_per_viewpoint: config.rays.total_rays(),
        counts,
    })
}
