//! Design scenarios and their sparse evaluation plan.
//!
//! Two procedures are supported: a single development replacing existing
//! structures with a new massing, appraised over a radius, and regional
//! up-zoning, where every building in turn gains floors and only it and its
//! nearest neighbours are re-simulated.

mod run;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use run::{evaluate_buildings, run_plan, Evaluation, PlanOutput, PlanRunner};

use crate::citymodel::{Building, CityModel, ScenarioEdit};
use crate::impact::{ImpactMatrix, MetricMatrix, ScenarioMetrics};
use crate::{Error, Result};

pub const DEFAULT_RADIUS: f64 = 500.0;
pub const DEFAULT_K_NEIGHBORS: usize = 9;
pub const DEFAULT_N_FLOORS: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub edit: ScenarioEdit,
    /// Existing building changed by the edit; `None` for massing
    /// replacement.
    pub modified_building_id: Option<String>,
    /// Buildings to simulate, modified building first when there is one.
    pub evaluation_window: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ScenarioSet {
    pub reference: CityModel,
    pub scenarios: Vec<Scenario>,
}

impl ScenarioSet {
    /// Checks id uniqueness and that every window is a non-empty subset of
    /// the buildings present after the edit.
    pub fn new(reference: CityModel, scenarios: Vec<Scenario>) -> Result<Self> {
        let mut ids = BTreeSet::new();
        for s in &scenarios {
            if !ids.insert(s.id.as_str()) {
                return Err(Error::Config(format!("duplicate scenario id {}", s.id)));
            }
            if s.evaluation_window.is_empty() {
                return Err(Error::EmptyWindow);
            }
            let removed: &[String] = match &s.edit {
                ScenarioEdit::ReplaceMassing { removed_ids, .. } => removed_ids,
                ScenarioEdit::AddFloors { .. } => &[],
            };
            for id in &s.evaluation_window {
                reference.building(id)?;
                if removed.contains(id) {
                    return Err(Error::Config(format!(
                        "scenario {}: window holds removed building {id}",
                        s.id
                    )));
                }
            }
        }
        Ok(Self { reference, scenarios })
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    /// Buildings needing a reference evaluation: the union of all windows,
    /// in city order. An empty set evaluates the whole reference.
    pub fn reference_window(&self) -> Vec<String> {
        if self.scenarios.is_empty() {
            return self.reference.buildings().iter().map(|b| b.id.clone()).collect();
        }
        let union: BTreeSet<&str> = self
            .scenarios
            .iter()
            .flat_map(|s| s.evaluation_window.iter().map(String::as_str))
            .collect();
        self.reference
            .buildings()
            .iter()
            .filter(|b| union.contains(b.id.as_str()))
            .map(|b| b.id.clone())
            .collect()
    }

    /// Alternative evaluations plus reference evaluations.
    pub fn planned_evaluations(&self) -> usize {
        self.scenarios.iter().map(|s| s.evaluation_window.len()).sum::<usize>() + self.reference_window().len()
    }

    /// JSON manifest of the plan.
    pub fn manifest_json(&self) -> String {
        let m = serde_json::json!({
            "reference_hash": self.reference.content_hash(),
            "reference_window": self.reference_window(),
            "planned_evaluations": self.planned_evaluations(),
            "scenarios": self.scenarios,
        });
        serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n"
    }

    /// Assembles the impact matrix of a plan's metric (or VC) matrices.
    pub fn impact(&self, reference: &MetricMatrix, alternatives: &[MetricMatrix]) -> Result<ImpactMatrix> {
        if alternatives.len() != self.scenarios.len() {
            return Err(Error::Internal("one matrix per scenario expected".into()));
        }
        let inputs: Vec<ScenarioMetrics<'_>> = self
            .scenarios
            .iter()
            .zip(alternatives)
            .map(|(s, m)| ScenarioMetrics {
                matrix: m,
                modified_building: s.modified_building_id.as_deref(),
            })
            .collect();
        ImpactMatrix::from_scenarios(reference, &inputs)
    }
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Area-weighted centroid of several footprints.
pub fn massing_centroid(massing: &[Building]) -> Option<[f64; 2]> {
    let mut area = 0.0;
    let mut c = [0.0; 2];
    for b in massing {
        let a = b.footprint.area();
        let p = b.footprint.centroid();
        area += a;
        c[0] += a * p[0];
        c[1] += a * p[1];
    }
    (area > 0.0).then(|| [c[0] / area, c[1] / area])
}

/// One scenario replacing `removed_ids` with `massing`. The window holds
/// every remaining building whose centroid lies within `radius` of the
/// massing centroid; the massing itself has no reference state and is left
/// out.
pub fn single_development(
    city: &CityModel,
    removed_ids: &[String],
    massing: Vec<Building>,
    radius: f64,
) -> Result<ScenarioSet> {
    if !(radius > 0.0) {
        return Err(Error::Config(format!("radius must be positive, got {radius}")));
    }
    if massing.is_empty() {
        return Err(Error::InvalidEdit("massing holds no building".into()));
    }
    let edit = ScenarioEdit::ReplaceMassing {
        removed_ids: removed_ids.to_vec(),
        added: massing,
    };
    // Validates ids, geometry and terrain coverage.
    city.apply_edit(&edit)?;
    let ScenarioEdit::ReplaceMassing { added, .. } = &edit else {
        unreachable!()
    };
    let center = massing_centroid(added).ok_or_else(|| Error::InvalidEdit("massing has zero area".into()))?;
    let window: Vec<String> = city
        .buildings()
        .iter()
        .filter(|b| !removed_ids.contains(&b.id))
        .filter(|b| distance(b.centroid(), center) <= radius)
        .map(|b| b.id.clone())
        .collect();
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    ScenarioSet::new(
        city.clone(),
        vec![Scenario {
            id: "development".into(),
            edit,
            modified_building_id: None,
            evaluation_window: window,
        }],
    )
}

/// The `k` buildings nearest to `id` by centroid distance, ties broken by
/// id.
pub fn nearest_neighbors(city: &CityModel, id: &str, k: usize) -> Result<Vec<String>> {
    let c = city.building(id)?.centroid();
    let mut others: Vec<(f64, &str)> = city
        .buildings()
        .iter()
        .filter(|b| b.id != id)
        .map(|b| (distance(b.centroid(), c), b.id.as_str()))
        .collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    Ok(others.into_iter().take(k).map(|(_, id)| id.to_string()).collect())
}

/// One up-zoning scenario per building; each window is the building and its
/// `k` nearest neighbours.
pub fn regional_upzoning(city: &CityModel, n_floors: u32, k: usize) -> Result<ScenarioSet> {
    if n_floors < 1 {
        return Err(Error::Config("n_floors must be at least 1".into()));
    }
    if k < 1 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if city.len() <= k {
        return Err(Error::Config(format!(
            "regional up-zoning needs more than k = {k} buildings, city has {}",
            city.len()
        )));
    }
    let scenarios = city
        .buildings()
        .iter()
        .map(|b| {
            let mut window = vec![b.id.clone()];
            window.extend(nearest_neighbors(city, &b.id, k)?);
            Ok(Scenario {
                id: format!("upzone:{}", b.id),
                edit: ScenarioEdit::AddFloors {
                    building_id: b.id.clone(),
                    n_floors,
                },
                modified_building_id: Some(b.id.clone()),
                evaluation_window: window,
            })
        })
        .collect::<Result<_>>()?;
    ScenarioSet::new(city.clone(), scenarios)
}
