//! CSV and GeoJSON writers for impact results.

use serde_json::{json, Map, Value};

use super::effects::DriverRanking;
use super::price::PriceImpact;
use super::ImpactMatrix;
use crate::citymodel::io::polygon_geometry;
use crate::citymodel::CityModel;
use crate::{Error, Result};

pub const IMPACT_CSV_HEADER: [&str; 8] = [
    "building_id",
    "scenario_id",
    "metric",
    "v_ref",
    "v_alt",
    "delta",
    "rel_change",
    "flags",
];

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

fn internal(e: csv::Error) -> Error {
    Error::Internal(e.to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Long format: one row per entry and metric.
pub fn impact_csv(matrix: &ImpactMatrix) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(IMPACT_CSV_HEADER).map_err(internal)?;
    for e in &matrix.entries {
        for (i, name) in matrix.metric_names.iter().enumerate() {
            w.write_record([
                e.building_id.as_str(),
                &e.scenario_id,
                name,
                &e.v_ref[i].to_string(),
                &e.v_alt[i].to_string(),
                &e.delta[i].to_string(),
                &opt(e.rel[i].value()),
                e.rel[i].flag(),
            ])
            .map_err(internal)?;
        }
    }
    finish(w)
}

/// One row per (building, scenario) price entry.
pub fn price_impact_csv(price: &PriceImpact) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "building_id",
        "scenario_id",
        "vc_ref",
        "vc_alt",
        "d_vc",
        "d_lnP",
        "rel_price_change",
    ])
    .map_err(internal)?;
    for e in &price.entries {
        w.write_record([
            e.building_id.as_str(),
            &e.scenario_id,
            &e.vc_ref.to_string(),
            &e.vc_alt.to_string(),
            &e.d_vc.to_string(),
            &e.d_ln_price.to_string(),
            &e.relative_price_change.to_string(),
        ])
        .map_err(internal)?;
    }
    finish(w)
}

/// One row per scenario with its direct, cumulative local and net effect.
pub fn scenario_effects_csv(price: &PriceImpact) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scenario_id", "modified_building", "DE", "CLE", "net"])
        .map_err(internal)?;
    for s in &price.scenarios {
        w.write_record([
            s.scenario_id.as_str(),
            s.modified_building.as_deref().unwrap_or(""),
            &opt(s.de),
            &s.cle.to_string(),
            &s.net.to_string(),
        ])
        .map_err(internal)?;
    }
    finish(w)
}

fn num(v: Option<f64>) -> Value {
    v.map_or(Value::Null, |v| json!(v))
}

/// Map layer over the reference buildings. Per building: summed `d_lnP`
/// and its relative price change, the direct effect and cumulative local
/// effect of the scenario modifying it, the exposure to local effects, and
/// the top metric driving its worst adverse entry.
pub fn impact_geojson(city: &CityModel, price: &PriceImpact, drivers: Option<&[DriverRanking]>) -> String {
    let features: Vec<Value> = city
        .buildings()
        .iter()
        .map(|b| {
            let total = price.total_d_ln_price(&b.id);
            let own = price.scenario_modifying(&b.id);
            let exposure = price.exposure_of(&b.id);
            let top_driver = exposure
                .and_then(|e| e.worst_scenario.as_deref())
                .and_then(|s| drivers?.iter().find(|d| d.building_id == b.id && d.scenario_id == s))
                .and_then(|d| d.drivers.first())
                .map_or(Value::Null, |d| json!(d.metric));
            let mut props = Map::new();
            props.insert("id".into(), json!(b.id));
            props.insert("d_lnP".into(), num(total));
            props.insert("rel_price_change".into(), num(total.map(f64::exp_m1)));
            props.insert("DE".into(), num(own.and_then(|s| s.de)));
            props.insert("CLE".into(), num(own.map(|s| s.cle)));
            props.insert("ELE".into(), num(exposure.map(|e| e.ele)));
            props.insert(
                "adverse_exposure".into(),
                exposure.map_or(Value::Null, |e| json!(e.worst_scenario.is_some())),
            );
            props.insert("top_driver".into(), top_driver);
            json!({"type": "Feature", "geometry": polygon_geometry(&b.footprint), "properties": props})
        })
        .collect();
    let fc = json!({"type": "FeatureCollection", "features": features});
    serde_json::to_string_pretty(&fc).expect("geojson serializes") + "\n"
}
