//! Impact algebra over reference and alternative metric matrices.
//!
//! A [`MetricMatrix`] holds the metric vectors evaluated for one scenario;
//! its keys are the evaluation mask. An [`ImpactMatrix`] stores one entry per
//! (building, scenario) pair evaluated in both the reference and the
//! scenario, with the delta and relative change of every metric.

mod effects;
mod export;
mod price;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use effects::{
    cumulative_local_effects, direct_effects, exposure_to_local_effects, local_effects, mevm, mevm_loss,
    rank_metric_drivers, Driver, DriverRanking, Exposure, Mevm, ScenarioEffect,
};
pub use export::{impact_csv, impact_geojson, price_impact_csv, scenario_effects_csv, IMPACT_CSV_HEADER};
pub use price::{price_impact, BuildingExposure, PriceEntry, PriceImpact, ScenarioPrice};

use crate::vcscore::VisualCapital;
use crate::viewmetrics::MetricVector;
use crate::{Error, Result};

/// Metric name used for Visual Capital matrices.
pub const VC_METRIC: &str = "VC";

/// Metric vectors of one scenario, keyed by building id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricMatrix {
    pub scenario_id: String,
    pub metric_names: Vec<String>,
    pub values: BTreeMap<String, Vec<f64>>,
}

impl MetricMatrix {
    pub fn new(scenario_id: impl Into<String>, metric_names: Vec<String>) -> Self {
        Self {
            scenario_id: scenario_id.into(),
            metric_names,
            values: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, building_id: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let id = building_id.into();
        if values.len() != self.metric_names.len() {
            return Err(Error::InvalidData(format!(
                "building {id}: {} values for {} metrics",
                values.len(),
                self.metric_names.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!("building {id}: non-finite metric value")));
        }
        self.values.insert(id, values);
        Ok(())
    }

    pub fn from_vectors(
        scenario_id: impl Into<String>,
        metric_names: Vec<String>,
        vectors: &[MetricVector],
    ) -> Result<Self> {
        let mut m = Self::new(scenario_id, metric_names);
        for v in vectors {
            m.insert(v.building_id.clone(), v.values.clone())?;
        }
        Ok(m)
    }

    /// One-column matrix of Visual Capital values.
    pub fn from_vc(scenario_id: impl Into<String>, vc: &[VisualCapital]) -> Result<Self> {
        let mut m = Self::new(scenario_id, vec![VC_METRIC.to_string()]);
        for v in vc {
            m.insert(v.building_id.clone(), vec![v.vc])?;
        }
        Ok(m)
    }

    pub fn get(&self, building_id: &str) -> Option<&[f64]> {
        self.values.get(building_id).map(Vec::as_slice)
    }

    pub fn mask(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Relative change of one metric. Zero reference values are flagged rather
/// than divided by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum RelChange {
    Value(f64),
    /// Reference is zero and the scenario gains a positive value.
    NewView,
    /// Positive reference drops to exactly zero; counts as `-1`.
    FullObstruction,
    /// Reference is zero and the value turns negative.
    Undefined,
}

impl RelChange {
    /// Numeric value where one exists.
    pub fn value(&self) -> Option<f64> {
        match self {
            RelChange::Value(v) => Some(*v),
            RelChange::FullObstruction => Some(-1.0),
            RelChange::NewView | RelChange::Undefined => None,
        }
    }

    pub fn flag(&self) -> &'static str {
        match self {
            RelChange::Value(_) => "",
            RelChange::NewView => "new_view",
            RelChange::FullObstruction => "full_obstruction",
            RelChange::Undefined => "undefined",
        }
    }
}

/// `(v_alt - v_ref) / v_ref`, with the zero-reference cases flagged.
/// Negative references divide by their magnitude so the sign follows the
/// delta.
pub fn relative_change(v_ref: f64, v_alt: f64) -> RelChange {
    let delta = v_alt - v_ref;
    if v_ref == 0.0 {
        if delta > 0.0 {
            RelChange::NewView
        } else if delta < 0.0 {
            RelChange::Undefined
        } else {
            RelChange::Value(0.0)
        }
    } else if v_ref > 0.0 && v_alt == 0.0 {
        RelChange::FullObstruction
    } else {
        RelChange::Value(delta / v_ref.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioColumn {
    pub scenario_id: String,
    pub modified_building: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactEntry {
    pub building_id: String,
    pub scenario_id: String,
    pub v_ref: Vec<f64>,
    pub v_alt: Vec<f64>,
    pub delta: Vec<f64>,
    pub rel: Vec<RelChange>,
}

/// Sparse building × scenario matrix of metric deltas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactMatrix {
    pub metric_names: Vec<String>,
    pub scenarios: Vec<ScenarioColumn>,
    /// Ordered by scenario, then building id.
    pub entries: Vec<ImpactEntry>,
}

/// One alternative scenario's metrics with the building it modifies, if
/// any.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioMetrics<'a> {
    pub matrix: &'a MetricMatrix,
    pub modified_building: Option<&'a str>,
}

fn check_names(reference: &[String], other: &[String]) -> Result<()> {
    if reference == other {
        return Ok(());
    }
    Err(Error::RegistryMismatch {
        missing: reference.iter().filter(|n| !other.contains(n)).cloned().collect(),
        extra: other.iter().filter(|n| !reference.contains(n)).cloned().collect(),
    })
}

impl ImpactMatrix {
    /// Builds the impact of several scenarios against one reference.
    pub fn from_scenarios(reference: &MetricMatrix, scenarios: &[ScenarioMetrics<'_>]) -> Result<Self> {
        let mut columns = Vec::with_capacity(scenarios.len());
        let mut entries = Vec::new();
        for s in scenarios {
            check_names(&reference.metric_names, &s.matrix.metric_names)?;
            if columns
                .iter()
                .any(|c: &ScenarioColumn| c.scenario_id == s.matrix.scenario_id)
            {
                return Err(Error::InvalidData(format!(
                    "duplicate scenario id {}",
                    s.matrix.scenario_id
                )));
            }
            columns.push(ScenarioColumn {
                scenario_id: s.matrix.scenario_id.clone(),
                modified_building: s.modified_building.map(str::to_string),
            });
            for (id, alt) in &s.matrix.values {
                let Some(rf) = reference.values.get(id) else { continue };
                entries.push(ImpactEntry {
                    building_id: id.clone(),
                    scenario_id: s.matrix.scenario_id.clone(),
                    v_ref: rf.clone(),
                    v_alt: alt.clone(),
                    delta: alt.iter().zip(rf).map(|(a, r)| a - r).collect(),
                    rel: rf.iter().zip(alt).map(|(r, a)| relative_change(*r, *a)).collect(),
                });
            }
        }
        Ok(Self {
            metric_names: reference.metric_names.clone(),
            scenarios: columns,
            entries,
        })
    }

    pub fn scenario(&self, scenario_id: &str) -> Option<&ScenarioColumn> {
        self.scenarios.iter().find(|c| c.scenario_id == scenario_id)
    }

    pub fn entry(&self, building_id: &str, scenario_id: &str) -> Option<&ImpactEntry> {
        self.entries
            .iter()
            .find(|e| e.building_id == building_id && e.scenario_id == scenario_id)
    }

    pub fn entries_for(&self, scenario_id: &str) -> impl Iterator<Item = &ImpactEntry> {
        let id = scenario_id.to_string();
        self.entries.iter().filter(move |e| e.scenario_id == id)
    }

    /// True when the entry sits on the diagonal (the scenario's own
    /// modified building).
    pub fn is_direct(&self, entry: &ImpactEntry) -> bool {
        self.scenario(&entry.scenario_id)
            .and_then(|c| c.modified_building.as_deref())
            .is_some_and(|m| m == entry.building_id)
    }

    /// Scales every delta by `factor` (used to turn VC deltas into
    /// log-price deltas). References and relative changes are kept.
    pub fn scaled(&self, factor: f64) -> ImpactMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            for d in &mut e.delta {
                *d *= factor;
            }
        }
        out
    }
}

/// Impact of a single alternative against the reference.
pub fn delta(alt: &MetricMatrix, reference: &MetricMatrix) -> Result<ImpactMatrix> {
    ImpactMatrix::from_scenarios(
        reference,
        &[ScenarioMetrics {
            matrix: alt,
            modified_building: None,
        }],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(id: &str, rows: &[(&str, [f64; 2])]) -> MetricMatrix {
        let mut m = MetricMatrix::new(id, vec!["a".into(), "b".into()]);
        for (b, v) in rows {
            m.insert(*b, v.to_vec()).unwrap();
        }
        m
    }

    #[test]
    fn relative_change_cases() {
        assert_eq!(relative_change(0.04, 0.02), RelChange::Value(-0.5));
        let RelChange::Value(v) = relative_change(0.023, 0.003) else {
            panic!()
        };
        assert!((v + 0.8696).abs() < 1e-4);
        assert_eq!(relative_change(0.0, 0.05), RelChange::NewView);
        assert_eq!(relative_change(0.3, 0.0), RelChange::FullObstruction);
        assert_eq!(relative_change(0.0, 0.0), RelChange::Value(0.0));
    }

    #[test]
    fn mask_is_intersection() {
        let r = matrix("ref", &[("1", [1.0, 2.0]), ("2", [0.5, 0.5])]);
        let a = matrix("alt", &[("2", [0.25, 1.0]), ("3", [1.0, 1.0])]);
        let d = delta(&a, &r).unwrap();
        assert_eq!(d.entries.len(), 1);
        assert_eq!(d.entries[0].delta, vec![-0.25, 0.5]);
    }

    #[test]
    fn registry_mismatch() {
        let r = matrix("ref", &[]);
        let a = MetricMatrix::new("alt", vec!["a".into(), "c".into()]);
        match delta(&a, &r) {
            Err(Error::RegistryMismatch { missing, extra }) => {
                assert_eq!(missing, vec!["b".to_string()]);
                assert_eq!(extra, vec!["c".to_string()]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = MetricMatrix::new("x", vec!["a".into()]);
        assert!(m.insert("1", vec![f64::NAN]).is_err());
        assert!(m.insert("1", vec![1.0, 2.0]).is_err());
    }
}
