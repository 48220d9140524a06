//! A small lakeside commune used by the examples, tests and the shipped
//! fixture under `data/toy_commune/`.
//!
//! 600 × 500 m at 5 m cells. A lake fills the southern 100 m; terrain rises
//! gently to the north; a shore road runs along the lake and a forest patch
//! with 15 m canopy sits to the east. Twenty buildings stand in three rows,
//! the first of them on the shoreline, with four townhomes sharing walls.

use std::path::Path;

use indexmap::IndexMap;

use crate::citymodel::{
    io, Building, CanopyGrid, CityModel, GridLayout, LandcoverGrid, Polygon, Raster, Roof, TerrainGrid,
};
use crate::hedonic::{attributes_csv, BuildingAttributes};
use crate::visibility::Category;
use crate::{Error, Result};

pub const LAKE_LEVEL: f64 = 400.0;
pub const SHORE_Y: f64 = 100.0;
const ROAD_Y: f64 = 110.0;
const SLOPE: f64 = 0.04;
const FOREST: [f64; 4] = [450.0, 560.0, 250.0, 400.0];
const CANOPY_HEIGHT: f64 = 15.0;

/// Agglomeration assigned to every toy building.
pub const TOY_AGGLOMERATION: &str = "Lausanne";
/// Buildings replaced by the toy development massing.
pub const TOY_REMOVED: [&str; 2] = ["b13", "b14"];

// id, x0, x1, y0, y1, eave, gabled
type Spec = (&'static str, f64, f64, f64, f64, f64, bool);

const BUILDINGS: [Spec; 20] = [
    ("b01", 40.0, 60.0, 120.0, 134.0, 9.0, false),
    ("b02", 90.0, 110.0, 120.0, 134.0, 12.0, true),
    ("b03", 150.0, 162.0, 120.0, 134.0, 7.5, false),
    ("b04", 162.0, 174.0, 120.0, 134.0, 7.5, false),
    ("b05", 174.0, 186.0, 120.0, 134.0, 7.5, false),
    ("b06", 186.0, 198.0, 120.0, 134.0, 7.5, false),
    ("b07", 240.0, 262.0, 120.0, 134.0, 15.0, false),
    ("b08", 300.0, 320.0, 120.0, 134.0, 10.5, true),
    ("b09", 40.0, 60.0, 200.0, 214.0, 12.0, false),
    ("b10", 100.0, 120.0, 200.0, 214.0, 9.0, true),
    ("b11", 160.0, 180.0, 200.0, 214.0, 15.0, false),
    ("b12", 220.0, 240.0, 200.0, 214.0, 9.0, false),
    ("b13", 280.0, 300.0, 200.0, 214.0, 12.0, false),
    ("b14", 340.0, 360.0, 200.0, 214.0, 9.0, true),
    ("b15", 60.0, 80.0, 300.0, 316.0, 12.0, false),
    ("b16", 130.0, 150.0, 300.0, 316.0, 9.0, true),
    ("b17", 200.0, 220.0, 300.0, 316.0, 15.0, false),
    ("b18", 270.0, 290.0, 300.0, 316.0, 9.0, false),
    ("b19", 340.0, 360.0, 300.0, 316.0, 12.0, true),
    ("b20", 400.0, 420.0, 300.0, 316.0, 9.0, false),
];

const MASSING: [Spec; 3] = [
    ("m1", 275.0, 295.0, 195.0, 215.0, 18.0, false),
    ("m2", 305.0, 325.0, 195.0, 210.0, 21.0, false),
    ("m3", 335.0, 365.0, 200.0, 215.0, 15.0, true),
];

/// Ids of the buildings on the lake shore.
pub fn shoreline_ids() -> Vec<&'static str> {
    BUILDINGS.iter().filter(|b| b.3 < 150.0).map(|b| b.0).collect()
}

/// Ids of the back row, furthest from the lake.
pub fn inland_ids() -> Vec<&'static str> {
    BUILDINGS.iter().filter(|b| b.3 >= 300.0).map(|b| b.0).collect()
}

pub fn layout() -> GridLayout {
    GridLayout::new(0.0, 0.0, 5.0, 120, 100).expect("valid layout")
}

fn ground_at(y: f64) -> f64 {
    let z = if y < SHORE_Y {
        LAKE_LEVEL
    } else {
        LAKE_LEVEL + SLOPE * (y - SHORE_Y)
    };
    (z * 100.0).round() / 100.0
}

fn in_forest(x: f64, y: f64) -> bool {
    (FOREST[0]..FOREST[1]).contains(&x) && (FOREST[2]..FOREST[3]).contains(&y)
}

fn rasters() -> (Raster, Raster, Raster) {
    let l = layout();
    let mut terrain = Raster::filled(l, 0.0);
    let mut canopy = Raster::filled(l, 0.0);
    let mut landcover = Raster::filled(l, Category::Grass.code() as f64);
    for row in 0..l.nrows {
        for col in 0..l.ncols {
            let [x0, x1, y0, y1] = l.cell_bounds(row, col);
            let (x, y) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
            terrain.set(row, col, ground_at(y));
            let cat = if y < SHORE_Y {
                Category::Water
            } else if y < ROAD_Y {
                Category::LocalRoad
            } else if in_forest(x, y) {
                canopy.set(row, col, CANOPY_HEIGHT);
                Category::Nature
            } else {
                Category::Grass
            };
            landcover.set(row, col, cat.code() as f64);
        }
    }
    (terrain, canopy, landcover)
}

fn building(spec: &Spec) -> Building {
    let &(id, x0, x1, y0, y1, eave, gabled) = spec;
    let roof = if gabled {
        Roof::Gabled {
            ridge_height: eave + 4.0,
            ridge_axis: 0.0,
        }
    } else {
        Roof::Flat
    };
    Building::new(
        id,
        Polygon::rectangle(x0, y0, x1, y1),
        ground_at((y0 + y1) / 2.0),
        eave,
        roof,
    )
    .expect("toy building is valid")
}

pub fn toy_buildings() -> Vec<Building> {
    BUILDINGS.iter().map(building).collect()
}

/// The three-structure development replacing [`TOY_REMOVED`].
pub fn toy_massing() -> Vec<Building> {
    MASSING.iter().map(building).collect()
}

pub fn toy_commune() -> CityModel {
    let (t, c, l) = rasters();
    CityModel::new(
        TerrainGrid::new(t).expect("terrain"),
        CanopyGrid::new(c).expect("canopy"),
        LandcoverGrid::new(l).expect("landcover"),
        toy_buildings(),
    )
    .expect("toy commune is valid")
}

fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

/// Property attributes for appraisal, one row per building.
pub fn toy_attributes() -> Vec<BuildingAttributes> {
    BUILDINGS
        .iter()
        .map(|spec| {
            let b = building(spec);
            let area = b.footprint.area();
            let floors = (b.eave_height / 3.0).floor().max(1.0);
            let dist = (b.centroid()[1] - SHORE_Y).max(1.0);
            let covariates: IndexMap<String, f64> = [
                ("log_volume", round4((area * b.eave_height).ln())),
                ("n_rooms", (2.0 + floors).min(7.0)),
                ("condition", 3.0),
                ("fitout_standard", if spec.6 { 4.0 } else { 3.0 }),
                ("log_distance_water", round4(dist.ln())),
                ("age", 0.5),
                ("log_plot_area", round4((2.0 * area).ln())),
                ("log_macro_location", 1.2),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
            BuildingAttributes {
                building_id: b.id,
                agglomeration: TOY_AGGLOMERATION.to_string(),
                transaction_year: 2017,
                covariates,
            }
        })
        .collect()
}

/// File names written by [`write_toy_commune`].
pub const TOY_FILES: [&str; 6] = [
    "terrain.asc",
    "canopy.asc",
    "landcover.asc",
    "buildings.geojson",
    "massing.geojson",
    "attributes.csv",
];

/// The commune as plain input files: name and contents.
pub fn toy_files() -> Result<Vec<(&'static str, String)>> {
    let (t, c, l) = rasters();
    Ok(vec![
        (TOY_FILES[0], t.to_asc()),
        (TOY_FILES[1], c.to_asc()),
        (TOY_FILES[2], l.to_asc()),
        (TOY_FILES[3], io::buildings_to_geojson(&toy_buildings())),
        (TOY_FILES[4], io::buildings_to_geojson(&toy_massing())),
        (TOY_FILES[5], attributes_csv(&toy_attributes())?),
    ])
}

/// Writes [`toy_files`] into `dir`.
pub fn write_toy_commune(dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, text) in toy_files()? {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
