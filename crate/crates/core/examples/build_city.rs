//! Load the shipped toy commune from disk, inspect it, and apply an edit.
//!
//! `cargo run --example build_city`

use std::path::Path;

use design_appraisal::citymodel::{load_city, ScenarioEdit};

fn main() -> design_appraisal::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_commune");
    let city = load_city(
        dir.join("terrain.asc"),
        dir.join("buildings.geojson"),
        Some(&dir.join("canopy.asc")),
        Some(&dir.join("landcover.asc")),
    )?;
    let layout = city.layout();
    println!(
        "{} buildings on a {}x{} grid of {} m cells, {:.0} m² of footprint",
        city.len(),
        layout.ncols,
        layout.nrows,
        layout.cell_size,
        city.total_footprint_area()
    );
    for b in city.buildings().iter().take(5) {
        let [x, y] = b.centroid();
        println!(
            "  {:>4}  eave {:>5.1} m  centroid ({x:.0}, {y:.0})  group {}",
            b.id, b.eave_height, b.joint_group
        );
    }
    println!("content hash {}", city.content_hash());

    let taller = city.apply_edit(&ScenarioEdit::AddFloors {
        building_id: "b07".into(),
        n_floors: 2,
    })?;
    println!(
        "b07 +2 floors: eave {} -> {} m, hash {}",
        city.building("b07")?.eave_height,
        taller.building("b07")?.eave_height,
        taller.content_hash()
    );
    Ok(())
}
