//! GeoJSON building I/O.

use std::path::Path;

use serde_json::{json, Map, Value};

use super::building::{Building, Roof};
use super::geometry::{Point2, Polygon};
use crate::{Error, Result};

fn ring(value: &Value) -> Option<Vec<Point2>> {
    value
        .as_array()?
        .iter()
        .map(|p| {
            let c = p.as_array()?;
            Some([c.first()?.as_f64()?, c.get(1)?.as_f64()?])
        })
        .collect()
}

fn prop_f64(props: &Map<String, Value>, key: &str) -> Option<f64> {
    props.get(key).and_then(Value::as_f64)
}

fn feature_to_building(feature: &Value, index: usize) -> std::result::Result<Building, (String, String)> {
    let props = feature
        .get("properties")
        .and_then(Value::as_object)
        .ok_or_else(|| (format!("feature #{index}"), "missing properties".to_string()))?;
    let id = match props.get("id") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => return Err((format!("feature #{index}"), "missing id".into())),
    };
    let fail = |msg: &str| (id.clone(), msg.to_string());

    let geometry = feature.get("geometry").ok_or_else(|| fail("missing geometry"))?;
    if geometry.get("type").and_then(Value::as_str) != Some("Polygon") {
        return Err(fail("geometry must be a Polygon"));
    }
    let rings = geometry
        .get("coordinates")
        .and_then(Value::as_array)
        .ok_or_else(|| fail("missing coordinates"))?;
    let mut rings = rings.iter().map(ring);
    let exterior = rings.next().flatten().ok_or_else(|| fail("bad exterior ring"))?;
    let holes = rings.collect::<Option<Vec<_>>>().ok_or_else(|| fail("bad hole ring"))?;

    let ground = prop_f64(props, "ground_elevation").ok_or_else(|| fail("missing ground_elevation"))?;
    let eave = prop_f64(props, "eave_height").ok_or_else(|| fail("missing eave_height"))?;
    let roof = match props.get("roof_type").and_then(Value::as_str).unwrap_or("flat") {
        "flat" => Roof::Flat,
        "gabled" => Roof::Gabled {
            ridge_height: prop_f64(props, "ridge_height").ok_or_else(|| fail("gabled roof needs ridge_height"))?,
            ridge_axis: prop_f64(props, "ridge_axis").unwrap_or(0.0),
        },
        other => return Err(fail(&format!("unknown roof_type {other}"))),
    };
    Ok(Building {
        joint_group: id.clone(),
        id,
        footprint: Polygon::new(exterior, holes).normalized(),
        ground_elevation: ground,
        eave_height: eave,
        roof,
    })
}

/// Parses a FeatureCollection of building polygons. Structural problems in a
/// feature are reported as [`Error::InvalidBuilding`] naming its id.
pub fn parse_buildings(text: &str, path: &Path) -> Result<Vec<Building>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::parse(path, e))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(Error::parse(path, "expected a FeatureCollection"));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(path, "missing features"))?;
    let mut out = Vec::with_capacity(features.len());
    for (i, f) in features.iter().enumerate() {
        let b = feature_to_building(f, i).map_err(|(id, reason)| Error::InvalidBuilding { id, reason })?;
        b.validate()?;
        out.push(b);
    }
    Ok(out)
}

pub fn read_buildings(path: impl AsRef<Path>) -> Result<Vec<Building>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_buildings(&text, path)
}

fn closed(ring: &[Point2]) -> Value {
    let mut pts: Vec<Value> = ring.iter().map(|p| json!([p[0], p[1]])).collect();
    if let Some(first) = ring.first() {
        pts.push(json!([first[0], first[1]]));
    }
    Value::Array(pts)
}

pub fn polygon_geometry(p: &Polygon) -> Value {
    let rings: Vec<Value> = p.rings().map(closed).collect();
    json!({ "type": "Polygon", "coordinates": rings })
}

pub fn building_feature(b: &Building) -> Value {
    let mut props = Map::new();
    props.insert("id".into(), json!(b.id));
    props.insert("ground_elevation".into(), json!(b.ground_elevation));
    props.insert("eave_height".into(), json!(b.eave_height));
    match b.roof {
        Roof::Flat => {
            props.insert("roof_type".into(), json!("flat"));
        }
        Roof::Gabled {
            ridge_height,
            ridge_axis,
        } => {
            props.insert("roof_type".into(), json!("gabled"));
            props.insert("ridge_height".into(), json!(ridge_height));
            props.insert("ridge_axis".into(), json!(ridge_axis));
        }
    }
    props.insert("joint_group".into(), json!(b.joint_group));
    json!({ "type": "Feature", "geometry": polygon_geometry(&b.footprint), "properties": props })
}

pub fn buildings_to_geojson(buildings: &[Building]) -> String {
    let features: Vec<Value> = buildings.iter().map(building_feature).collect();
    let doc = json!({ "type": "FeatureCollection", "features": features });
    serde_json::to_string_pretty(&doc).expect("geojson serializes") + "\n"
}

pub fn write_buildings(path: impl AsRef<Path>, buildings: &[Building]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, buildings_to_geojson(buildings)).map_err(|e| Error::io(path, e))
}
