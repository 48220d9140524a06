//! Add one floor to every building in turn, simulate each building with its
//! three nearest neighbours, and rank the up-zonings by net value change.
//!
//! `cargo run --release --example regional_upzoning`

use design_appraisal::demo;
use design_appraisal::hedonic::lakeside_model;
use design_appraisal::impact::price_impact;
use design_appraisal::scenario::{regional_upzoning, PlanRunner};
use design_appraisal::vcscore::reference_scorer;
use design_appraisal::viewmetrics::default_registry;
use design_appraisal::visibility::SimulationConfig;

fn main() -> design_appraisal::Result<()> {
    let city = demo::toy_commune();
    let set = regional_upzoning(&city, 1, 3)?;
    let registry = default_registry();
    let runner = PlanRunner::new(
        SimulationConfig::default(),
        registry.clone(),
        reference_scorer(&registry),
    )?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let out = runner.run(&set, workers)?;
    println!(
        "{} scenarios, {} evaluations planned, {} run",
        set.len(),
        set.planned_evaluations(),
        runner.evaluation_count()
    );

    let price = price_impact(&out.vc_impact(&set)?, &lakeside_model(), Some(demo::TOY_AGGLOMERATION))?;
    let mut scenarios = price.scenarios.clone();
    scenarios.sort_by(|a, b| b.net.total_cmp(&a.net));
    println!("{:<14}{:>10}{:>10}{:>10}", "scenario", "DE", "CLE", "net");
    for s in &scenarios {
        println!(
            "{:<14}{:>10.4}{:>10.4}{:>10.4}",
            s.scenario_id,
            s.de.unwrap_or(0.0),
            s.cle,
            s.net
        );
    }
    let exposed = price.exposure.iter().filter(|e| e.ele < 0.0).count();
    println!(
        "{exposed} of {} buildings lose value in at least one scenario",
        price.exposure.len()
    );
    Ok(())
}
