//! Aggregate visual shares into the 54 view metrics and score them into
//! Visual Capital, comparing a lakefront house with an inland one.
//!
//! `cargo run --release --example view_metrics`

use design_appraisal::demo;
use design_appraisal::scenario::evaluate_buildings;
use design_appraisal::vcscore::reference_scorer;
use design_appraisal::viewmetrics::default_registry;
use design_appraisal::visibility::SimulationConfig;

fn main() -> design_appraisal::Result<()> {
    let city = demo::toy_commune();
    let registry = default_registry();
    let scorer = reference_scorer(&registry);
    let shore = demo::shoreline_ids()[0].to_string();
    let inland = demo::inland_ids()[0].to_string();
    let evals = evaluate_buildings(
        &city,
        &[shore, inland],
        &SimulationConfig::default(),
        &registry,
        &scorer,
    )?;

    println!(
        "{:<28}{:>12}{:>12}",
        "metric", evals[0].vc.building_id, evals[1].vc.building_id
    );
    for name in [
        "maxVSH:Water",
        "meanVSH:Water",
        "maxVSH:Sky",
        "maxVSH:Vegetation",
        "maxVSH:Facade",
        "maxVSH:Far",
        "richness:Elements",
        "maxSentiment:Positive",
        "balance:Distance",
    ] {
        let i = registry.index_of(name).expect("registered metric");
        println!(
            "{name:<28}{:>12.4}{:>12.4}",
            evals[0].metrics.values[i], evals[1].metrics.values[i]
        );
    }
    println!("{:<28}{:>12.4}{:>12.4}", "VC", evals[0].vc.vc, evals[1].vc.vc);
    Ok(())
}
