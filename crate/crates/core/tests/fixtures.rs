//! The files under `data/` are what `ada export` writes. Regenerate them with
//! `cargo run --bin ada -- export --out crates/core/data` after changing a
//! built-in asset or the toy commune.

use std::path::Path;

use design_appraisal::cli::{export, RunConfig};
use design_appraisal::demo;
use design_appraisal::hedonic::{lakeside_model, read_attributes};
use design_appraisal::vcscore::{reference_scorer, VcScorer};
use design_appraisal::viewmetrics::{default_registry, MetricRegistry};

fn data() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
}

#[test]
fn shipped_data_matches_export() {
    let artifacts = export(&RunConfig::default()).unwrap();
    assert_eq!(artifacts.len(), 4 + demo::TOY_FILES.len() + 1);
    for a in &artifacts {
        let shipped = std::fs::read_to_string(data().join(&a.name)).unwrap_or_else(|e| panic!("{}: {e}", a.name));
        assert!(shipped == a.contents, "{} differs from the built-in", a.name);
    }
}

#[test]
fn shipped_assets_parse_to_built_ins() {
    let read = |n: &str| std::fs::read_to_string(data().join(n)).unwrap();
    let registry = MetricRegistry::from_json(&read("metric_registry.json")).unwrap();
    assert_eq!(registry, default_registry());
    let scorer = VcScorer::from_json(&read("reference_scorer.json")).unwrap();
    assert_eq!(scorer, reference_scorer(&registry));
    assert_eq!(
        design_appraisal::hedonic::HedonicModel::from_json(&read("hedonic_lakeside.json")).unwrap(),
        lakeside_model()
    );
}

#[test]
fn shipped_toy_commune_loads() {
    let cfg = RunConfig::load(data().join("toy_commune/config.toml")).unwrap();
    let city = design_appraisal::cli::load_config_city(&cfg).unwrap();
    assert_eq!(city.content_hash(), demo::toy_commune().content_hash());
    let attrs = read_attributes(cfg.paths.attributes.as_ref().unwrap()).unwrap();
    assert_eq!(attrs, demo::toy_attributes());
    assert_eq!(cfg.scenario.removed, demo::TOY_REMOVED);
}
