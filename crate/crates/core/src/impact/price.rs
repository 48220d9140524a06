//! Translation of Visual Capital deltas into log-price deltas.

use serde::{Deserialize, Serialize};

use super::effects::{cumulative_local_effects, exposure_to_local_effects};
use super::ImpactMatrix;
use crate::hedonic::HedonicModel;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceEntry {
    pub building_id: String,
    pub scenario_id: String,
    pub vc_ref: f64,
    pub vc_alt: f64,
    pub d_vc: f64,
    pub d_ln_price: f64,
    pub relative_price_change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioPrice {
    pub scenario_id: String,
    pub modified_building: Option<String>,
    /// Direct effect; absent when the scenario modifies no existing
    /// building.
    pub de: Option<f64>,
    pub cle: f64,
    pub net: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildingExposure {
    pub building_id: String,
    pub ele: f64,
    pub worst_scenario: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceImpact {
    pub beta_vc: f64,
    pub entries: Vec<PriceEntry>,
    pub scenarios: Vec<ScenarioPrice>,
    pub exposure: Vec<BuildingExposure>,
}

/// Prices a one-metric VC impact matrix with the model's VC slope for
/// `agglomeration`: `d_lnP = beta_vc * dVC`.
pub fn price_impact(vc: &ImpactMatrix, model: &HedonicModel, agglomeration: Option<&str>) -> Result<PriceImpact> {
    if vc.metric_names.len() != 1 {
        return Err(Error::InvalidData(format!(
            "price impact needs a single VC column, got {}",
            vc.metric_names.len()
        )));
    }
    let beta = model.vc_coefficient(agglomeration)?;
    let d = vc.scaled(beta);
    let entries = d
        .entries
        .iter()
        .map(|e| PriceEntry {
            building_id: e.building_id.clone(),
            scenario_id: e.scenario_id.clone(),
            vc_ref: e.v_ref[0],
            vc_alt: e.v_alt[0],
            d_vc: e.v_alt[0] - e.v_ref[0],
            d_ln_price: e.delta[0],
            relative_price_change: e.delta[0].exp_m1(),
        })
        .collect();
    let cle = cumulative_local_effects(&d);
    let scenarios = d
        .scenarios
        .iter()
        .zip(cle)
        .map(|(c, cle)| {
            let de = c
                .modified_building
                .as_deref()
                .and_then(|j| d.entry(j, &c.scenario_id))
                .map(|e| e.delta[0]);
            let cle = cle.values[0];
            ScenarioPrice {
                scenario_id: c.scenario_id.clone(),
                modified_building: c.modified_building.clone(),
                de,
                cle,
                net: de.unwrap_or(0.0) + cle,
            }
        })
        .collect();
    let exposure = exposure_to_local_effects(&d)
        .into_iter()
        .map(|e| BuildingExposure {
            building_id: e.building_id,
            ele: e.values[0],
            worst_scenario: e.worst_scenario[0].clone(),
        })
        .collect();
    Ok(PriceImpact {
        beta_vc: beta,
        entries,
        scenarios,
        exposure,
    })
}

impl PriceImpact {
    /// First-order sum of log-price deltas a building receives across all
    /// scenarios.
    pub fn total_d_ln_price(&self, building_id: &str) -> Option<f64> {
        let mut it = self.entries.iter().filter(|e| e.building_id == building_id).peekable();
        it.peek()?;
        Some(it.map(|e| e.d_ln_price).sum())
    }

    pub fn scenario_modifying(&self, building_id: &str) -> Option<&ScenarioPrice> {
        self.scenarios
            .iter()
            .find(|s| s.modified_building.as_deref() == Some(building_id))
    }

    pub fn exposure_of(&self, building_id: &str) -> Option<&BuildingExposure> {
        self.exposure.iter().find(|e| e.building_id == building_id)
    }
}
