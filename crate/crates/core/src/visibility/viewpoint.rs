use serde::{Deserialize, Serialize};

use crate::citymodel::joint::shared_interval;
use crate::citymodel::{CityModel, SNAP_TOLERANCE};
use crate::{Error, Result};

/// Height of the lowest viewpoint row above ground, metres.
pub const FIRST_LEVEL_HEIGHT: f64 = 1.5;

/// Distance between a viewpoint and its façade, metres.
pub const FACADE_OFFSET: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Viewpoint {
    pub building_id: String,
    pub position: [f64; 3],
    /// Horizontal unit normal pointing away from the façade.
    pub normal: [f64; 2],
    pub floor_index: u32,
    pub facade_index: u32,
}

/// Viewpoint placement on façades.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ViewpointConfig {
    /// Maximum horizontal gap between viewpoints along a wall, metres.
    pub spacing: f64,
    /// Vertical gap between viewpoint rows, metres.
    pub story_height: f64,
}

impl Default for ViewpointConfig {
    fn default() -> Self {
        Self {
            spacing: 8.0,
            story_height: 3.0,
        }
    }
}

impl ViewpointConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.spacing > 0.0) || !(self.story_height > 0.0) {
            return Err(Error::Config(
                "viewpoint spacing and story height must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Viewpoint heights above ground: 1.5 m, then every `story_height` while
/// below the eave. Buildings lower than 1.5 m get a single row at half
/// their eave height.
pub fn level_heights(eave_height: f64, story_height: f64) -> Vec<f64> {
    if eave_height <= FIRST_LEVEL_HEIGHT {
        return vec![eave_height / 2.0];
    }
    let mut out = Vec::new();
    let mut k = 0u32;
    loop {
        let h = FIRST_LEVEL_HEIGHT + k as f64 * story_height;
        if h >= eave_height {
            break;
        }
        out.push(h);
        k += 1;
    }
    out
}

/// Arc-length positions of viewpoints on a free wall stretch `[s0, s1]`:
/// `ceil(len / spacing)` points (at least one), centred in equal parts.
pub fn stretch_positions(s0: f64, s1: f64, spacing: f64) -> Vec<f64> {
    let len = s1 - s0;
    let n = ((len / spacing) - 1e-9).ceil().max(1.0) as usize;
    (0..n).map(|k| s0 + (k as f64 + 0.5) * len / n as f64).collect()
}

/// Parts of `[0, len]` not covered by any interval.
fn uncovered(len: f64, mut covered: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    covered.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    let mut cursor = 0.0;
    for (lo, hi) in covered {
        if lo > cursor {
            out.push((cursor, lo));
        }
        cursor = f64::max(cursor, hi);
    }
    if cursor < len {
        out.push((cursor, len));
    }
    out.retain(|(a, b)| b - a > SNAP_TOLERANCE);
    out
}

/// Places viewpoints on the exterior walls of a building. Wall stretches
/// shared with another member of its joint group are skipped. Ordering is
/// façade index, then arc length, then floor.
pub fn generate_viewpoints(city: &CityModel, building_id: &str, config: &ViewpointConfig) -> Result<Vec<Viewpoint>> {
    config.validate()?;
    let b = city.building(building_id)?;
    let partners: Vec<_> = city
        .buildings()
        .iter()
        .filter(|o| o.id != b.id && o.joint_group == b.joint_group)
        .collect();
    let levels = level_heights(b.eave_height, config.story_height);
    let mut out = Vec::new();

    for (facade_index, (a, e)) in b.footprint.edges().enumerate() {
        let dx = e[0] - a[0];
        let dy = e[1] - a[1];
        let len = dx.hypot(dy);
        if len == 0.0 {
            continue;
        }
        let (ux, uy) = (dx / len, dy / len);
        let normal = [uy, -ux];
        let covered: Vec<(f64, f64)> = partners
            .iter()
            .flat_map(|p| {
                p.footprint
                    .edges()
                    .filter_map(|pe| shared_interval((a, e), pe, SNAP_TOLERANCE))
            })
            .collect();
        for (s0, s1) in uncovered(len, covered) {
            for s in stretch_positions(s0, s1, config.spacing) {
                let x = a[0] + s * ux + FACADE_OFFSET * normal[0];
                let y = a[1] + s * uy + FACADE_OFFSET * normal[1];
                for (floor_index, h) in levels.iter().enumerate() {
                    out.push(Viewpoint {
                        building_id: b.id.clone(),
                        position: [x, y, b.ground_elevation + h],
                        normal,
                        floor_index: floor_index as u32,
                        facade_index: facade_index as u32,
                    });
                }
            }
        }
    }
    if out.is_empty() {
        log::warn!("building {building_id} has no exterior walls; no viewpoints generated");
    }
    Ok(out)
}
