//! Price every toy-commune building from its simulated Visual Capital and
//! its structural attributes.
//!
//! `cargo run --release --example appraise_design`

use design_appraisal::demo;
use design_appraisal::hedonic::lakeside_model;
use design_appraisal::scenario::evaluate_buildings;
use design_appraisal::vcscore::reference_scorer;
use design_appraisal::viewmetrics::default_registry;
use design_appraisal::visibility::SimulationConfig;

fn main() -> design_appraisal::Result<()> {
    let city = demo::toy_commune();
    let attrs = demo::toy_attributes();
    let registry = default_registry();
    let scorer = reference_scorer(&registry);
    let model = lakeside_model();
    let ids: Vec<String> = attrs.iter().map(|a| a.building_id.clone()).collect();
    let evals = evaluate_buildings(&city, &ids, &SimulationConfig::default(), &registry, &scorer)?;

    // The fixture's coefficients are rounded to two decimals, so absolute
    // price levels are only indicative; differences are exact.
    let beta = model.vc_coefficient(Some(demo::TOY_AGGLOMERATION))?;
    println!("{:<6}{:>8}{:>10}{:>16}", "id", "VC", "ln price", "view premium");
    for (a, e) in attrs.iter().zip(&evals) {
        let ln_price = model.predict(&a.with_vc(e.vc.vc))?;
        // Premium over the same property with VC = 0.
        let premium = (beta * e.vc.vc).exp_m1();
        println!(
            "{:<6}{:>8.3}{:>10.3}{:>15.1}%",
            a.building_id,
            e.vc.vc,
            ln_price,
            100.0 * premium
        );
    }
    Ok(())
}
