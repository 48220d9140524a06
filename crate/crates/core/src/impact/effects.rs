//! Direct, local, cumulative and exposure effects, the maximally exposed
//! view metric and driver ranking.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_names, ImpactEntry, ImpactMatrix};
use crate::vcscore::VcScorer;
use crate::{Error, Result};

/// The metric with the largest relative change for one entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mevm {
    pub building_id: String,
    pub scenario_id: String,
    pub metric_index: usize,
    pub metric: String,
    pub rel_change: f64,
}

fn pick(matrix: &ImpactMatrix, e: &ImpactEntry, loss_only: bool) -> Option<Mevm> {
    let mut best: Option<(usize, f64)> = None;
    for (i, rc) in e.rel.iter().enumerate() {
        let Some(v) = rc.value() else { continue };
        if loss_only && v >= 0.0 {
            continue;
        }
        if best.is_none_or(|(_, b)| v.abs() > b.abs()) {
            best = Some((i, v));
        }
    }
    best.map(|(i, v)| Mevm {
        building_id: e.building_id.clone(),
        scenario_id: e.scenario_id.clone(),
        metric_index: i,
        metric: matrix.metric_names[i].clone(),
        rel_change: v,
    })
}

/// Signed maximally exposed view metric per entry: largest |rc| with the
/// sign kept, new views excluded, ties to the earlier metric. Entries
/// without any defined relative change are skipped.
pub fn mevm(matrix: &ImpactMatrix) -> Vec<Mevm> {
    matrix.entries.iter().filter_map(|e| pick(matrix, e, false)).collect()
}

/// Loss-only variant: the largest relative loss per entry. Entries without
/// a loss are skipped.
pub fn mevm_loss(matrix: &ImpactMatrix) -> Vec<Mevm> {
    matrix.entries.iter().filter_map(|e| pick(matrix, e, true)).collect()
}

/// A per-scenario vector over metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEffect {
    pub scenario_id: String,
    pub values: Vec<f64>,
}

/// Delta at each scenario's own modified building.
pub fn direct_effects(matrix: &ImpactMatrix) -> Result<Vec<ScenarioEffect>> {
    matrix
        .scenarios
        .iter()
        .map(|c| {
            let j = c
                .modified_building
                .as_deref()
                .ok_or_else(|| Error::NoModifiedBuilding(c.scenario_id.clone()))?;
            let e = matrix.entry(j, &c.scenario_id).ok_or_else(|| {
                Error::InvalidData(format!(
                    "scenario {}: modified building {j} was not evaluated",
                    c.scenario_id
                ))
            })?;
            Ok(ScenarioEffect {
                scenario_id: c.scenario_id.clone(),
                values: e.delta.clone(),
            })
        })
        .collect()
}

/// Off-diagonal entries: buildings affected by a scenario they are not the
/// subject of.
pub fn local_effects(matrix: &ImpactMatrix) -> Vec<&ImpactEntry> {
    matrix.entries.iter().filter(|e| !matrix.is_direct(e)).collect()
}

/// Sum of local effects per scenario, in building-id order.
pub fn cumulative_local_effects(matrix: &ImpactMatrix) -> Vec<ScenarioEffect> {
    let m = matrix.metric_names.len();
    matrix
        .scenarios
        .iter()
        .map(|c| {
            let mut values = vec![0.0; m];
            for e in matrix.entries_for(&c.scenario_id).filter(|e| !matrix.is_direct(e)) {
                for (acc, d) in values.iter_mut().zip(&e.delta) {
                    *acc += d;
                }
            }
            ScenarioEffect {
                scenario_id: c.scenario_id.clone(),
                values,
            }
        })
        .collect()
}

/// Worst adverse local change faced by a building, per metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exposure {
    pub building_id: String,
    /// Most negative local delta, or 0 when there is none.
    pub values: Vec<f64>,
    /// Scenario realizing each value; `None` flags "no adverse exposure".
    pub worst_scenario: Vec<Option<String>>,
}

impl Exposure {
    pub fn has_adverse(&self, metric: usize) -> bool {
        self.worst_scenario[metric].is_some()
    }
}

/// Exposure for every building with at least one entry, in id order.
pub fn exposure_to_local_effects(matrix: &ImpactMatrix) -> Vec<Exposure> {
    let m = matrix.metric_names.len();
    let mut by_building: BTreeMap<&str, Exposure> = BTreeMap::new();
    for e in &matrix.entries {
        let exp = by_building.entry(&e.building_id).or_insert_with(|| Exposure {
            building_id: e.building_id.clone(),
            values: vec![0.0; m],
            worst_scenario: vec![None; m],
        });
        if matrix.is_direct(e) {
            continue;
        }
        for (i, d) in e.delta.iter().enumerate() {
            if *d < exp.values[i] {
                exp.values[i] = *d;
                exp.worst_scenario[i] = Some(e.scenario_id.clone());
            }
        }
    }
    by_building.into_values().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Driver {
    pub metric: String,
    /// Weight times delta.
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverRanking {
    pub building_id: String,
    pub scenario_id: String,
    pub drivers: Vec<Driver>,
}

/// Ranks metrics by |w_m × ΔV_m| for each entry. Zero contributions are
/// left out; ties keep registry order.
pub fn rank_metric_drivers(matrix: &ImpactMatrix, scorer: &VcScorer) -> Result<Vec<DriverRanking>> {
    let weights = scorer.linear_weights().ok_or(Error::RankingRequiresLinear)?;
    check_names(scorer.metric_names(), &matrix.metric_names)?;
    Ok(matrix
        .entries
        .iter()
        .map(|e| {
            let mut drivers: Vec<Driver> = e
                .delta
                .iter()
                .zip(weights)
                .zip(&matrix.metric_names)
                .map(|((d, w), name)| Driver {
                    metric: name.clone(),
                    contribution: w * d,
                })
                .filter(|d| d.contribution != 0.0)
                .collect();
            drivers.sort_by(|a, b| b.contribution.abs().total_cmp(&a.contribution.abs()));
            DriverRanking {
                building_id: e.building_id.clone(),
                scenario_id: e.scenario_id.clone(),
                drivers,
            }
        })
        .collect())
}
