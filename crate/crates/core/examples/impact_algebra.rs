//! Impact bookkeeping on hand-made metric matrices: deltas and relative
//! changes, the maximally exposed view metric, then scenario and exposure
//! effects.
//!
//! `cargo run --example impact_algebra`

use design_appraisal::impact::{
    cumulative_local_effects, direct_effects, exposure_to_local_effects, mevm, ImpactMatrix, MetricMatrix,
    ScenarioMetrics,
};

fn matrix(id: &str, rows: &[(&str, [f64; 2])]) -> MetricMatrix {
    let mut m = MetricMatrix::new(id, vec!["maxVSH:Water".into(), "maxVSH:Sky".into()]);
    for (b, v) in rows {
        m.insert(*b, v.to_vec()).expect("two metrics");
    }
    m
}

fn main() -> design_appraisal::Result<()> {
    let reference = matrix(
        "reference",
        &[("A", [0.04, 0.30]), ("B", [0.10, 0.25]), ("C", [0.00, 0.40])],
    );
    // A gains a floor: it sees more, B loses part of its lake view.
    let up_a = matrix(
        "upzone:A",
        &[("A", [0.05, 0.36]), ("B", [0.02, 0.22]), ("C", [0.00, 0.40])],
    );
    // C gains a floor and for the first time sees the lake.
    let up_c = matrix("upzone:C", &[("B", [0.10, 0.21]), ("C", [0.03, 0.45])]);
    let im = ImpactMatrix::from_scenarios(
        &reference,
        &[
            ScenarioMetrics {
                matrix: &up_a,
                modified_building: Some("A"),
            },
            ScenarioMetrics {
                matrix: &up_c,
                modified_building: Some("C"),
            },
        ],
    )?;

    for e in &im.entries {
        let rc: Vec<String> = e
            .rel
            .iter()
            .map(|r| r.value().map_or_else(|| r.flag().to_string(), |v| format!("{v:+.2}")))
            .collect();
        println!(
            "{} in {}: delta {:?}, relative {}",
            e.building_id,
            e.scenario_id,
            e.delta,
            rc.join(" ")
        );
    }
    for m in mevm(&im) {
        println!(
            "MEVM {} in {}: {} {:+.2}",
            m.building_id, m.scenario_id, m.metric, m.rel_change
        );
    }
    for (de, cle) in direct_effects(&im)?.iter().zip(cumulative_local_effects(&im)) {
        println!("{}: DE {:?}, CLE {:?}", de.scenario_id, de.values, cle.values);
    }
    for x in exposure_to_local_effects(&im) {
        println!("ELE {}: {:?} worst {:?}", x.building_id, x.values, x.worst_scenario);
    }
    Ok(())
}
