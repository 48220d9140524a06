//! Replace two lakefront houses with a denser three-block development and
//! report what the neighbours within 150 m gain or lose.
//!
//! `cargo run --release --example single_development`

use design_appraisal::demo;
use design_appraisal::hedonic::lakeside_model;
use design_appraisal::impact::{mevm_loss, price_impact};
use design_appraisal::scenario::{run_plan, single_development};
use design_appraisal::vcscore::reference_scorer;
use design_appraisal::viewmetrics::default_registry;
use design_appraisal::visibility::SimulationConfig;

fn main() -> design_appraisal::Result<()> {
    let city = demo::toy_commune();
    let removed: Vec<String> = demo::TOY_REMOVED.iter().map(|s| s.to_string()).collect();
    let set = single_development(&city, &removed, demo::toy_massing(), 150.0)?;
    println!("window: {}", set.scenarios[0].evaluation_window.join(", "));

    let registry = default_registry();
    let out = run_plan(
        &set,
        &SimulationConfig::default(),
        &registry,
        &reference_scorer(&registry),
        4,
    )?;
    let price = price_impact(&out.vc_impact(&set)?, &lakeside_model(), Some(demo::TOY_AGGLOMERATION))?;
    let losses = mevm_loss(&out.metric_impact(&set)?);

    println!(
        "{:<6}{:>9}{:>9}{:>10}  worst view loss",
        "id", "VC ref", "VC alt", "price"
    );
    for e in &price.entries {
        let worst = losses
            .iter()
            .find(|m| m.building_id == e.building_id)
            .map(|m| format!("{} {:+.0}%", m.metric, 100.0 * m.rel_change))
            .unwrap_or_default();
        println!(
            "{:<6}{:>9.3}{:>9.3}{:>9.2}%  {worst}",
            e.building_id,
            e.vc_ref,
            e.vc_alt,
            100.0 * e.relative_price_change
        );
    }
    let s = &price.scenarios[0];
    println!("cumulative local effect on ln price: {:+.4}", s.cle);
    Ok(())
}
