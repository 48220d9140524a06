//! One function per command. Each builds its output files in memory and
//! writes them under the configured output directory.

use std::path::{Path, PathBuf};

use crate::citymodel::{io as city_io, load_city, CityModel};
use crate::demo;
use crate::hedonic::{self, synth, HedonicModel, TransactionRecord, LAKESIDE_MODEL_JSON};
use crate::impact::{self, ImpactMatrix, PriceImpact};
use crate::scenario::{self, evaluate_buildings, PlanRunner, ScenarioSet};
use crate::vcscore::{load_scorer, reference_scorer, VcScorer};
use crate::viewmetrics::{default_registry, metrics_csv, MetricRegistry, MetricVector};
use crate::visibility::{generate_viewpoints, visual_share_csv, CATEGORY_REGISTRY_JSON};
use crate::{Error, Result};

use super::RunConfig;

/// A named output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    fn new(name: &str, contents: String) -> Self {
        Self {
            name: name.to_string(),
            contents,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssessMode {
    Single,
    Regional,
}

/// Writes artifacts into `dir`, creating parent directories.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.name);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            std::fs::write(&path, &a.contents).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

pub fn load_config_city(cfg: &RunConfig) -> Result<CityModel> {
    let p = &cfg.paths;
    load_city(
        cfg.require("terrain", &p.terrain)?,
        cfg.require("buildings", &p.buildings)?,
        p.canopy.as_deref(),
        p.landcover.as_deref(),
    )
}

pub fn load_config_registry(cfg: &RunConfig) -> Result<MetricRegistry> {
    match &cfg.paths.registry {
        Some(p) => MetricRegistry::load(p),
        None => Ok(default_registry()),
    }
}

pub fn load_config_scorer(cfg: &RunConfig, registry: &MetricRegistry) -> Result<VcScorer> {
    match &cfg.paths.scorer {
        Some(p) => load_scorer(p, registry),
        None => Ok(reference_scorer(registry)),
    }
}

pub fn load_config_model(cfg: &RunConfig) -> Result<HedonicModel> {
    match &cfg.paths.hedonic_model {
        Some(p) => HedonicModel::load(p),
        None => Ok(hedonic::lakeside_model()),
    }
}

fn in_pool<T: Send>(cfg: &RunConfig, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers())
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    pool.install(f)
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let internal = |e: csv::Error| Error::Internal(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(internal)?;
    for r in rows {
        w.write_record(&r).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// Validates the city model and writes it back with joint groups resolved,
/// plus a short summary.
pub fn build(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    cfg.validate()?;
    let city = load_config_city(cfg)?;
    let groups: std::collections::BTreeSet<&str> = city.buildings().iter().map(|b| b.joint_group.as_str()).collect();
    let summary = serde_json::json!({
        "buildings": city.len(),
        "joint_groups": groups.len(),
        "footprint_area": city.total_footprint_area(),
        "content_hash": city.content_hash(),
        "grid": city.layout(),
    });
    Ok(vec![
        Artifact::new("city.geojson", city_io::buildings_to_geojson(city.buildings())),
        Artifact::new(
            "city_summary.json",
            serde_json::to_string_pretty(&summary).expect("summary") + "\n",
        ),
    ])
}

/// Visual shares, view metrics and Visual Capital of every building of the
/// reference model. Buildings without any exposed façade are skipped.
pub fn simulate(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    cfg.validate()?;
    let city = load_config_city(cfg)?;
    let registry = load_config_registry(cfg)?;
    let scorer = load_config_scorer(cfg, &registry)?;
    let mut ids = Vec::with_capacity(city.len());
    for b in city.buildings() {
        if generate_viewpoints(&city, &b.id, &cfg.simulation.viewpoints)?.is_empty() {
            log::warn!("building {} has no exposed façade; skipped", b.id);
        } else {
            ids.push(b.id.clone());
        }
    }
    let evals = in_pool(cfg, || {
        evaluate_buildings(&city, &ids, &cfg.simulation, &registry, &scorer)
    })?;
    let tensors: Vec<_> = evals.iter().map(|e| e.tensor.clone()).collect();
    let vectors: Vec<MetricVector> = evals.iter().map(|e| e.metrics.clone()).collect();
    let vc = csv_text(
        &["building_id", "vc"],
        evals
            .iter()
            .map(|e| vec![e.vc.building_id.clone(), e.vc.vc.to_string()]),
    )?;
    Ok(vec![
        Artifact::new("visual_share.csv", visual_share_csv(&tensors)),
        Artifact::new("metrics.csv", metrics_csv(&registry, &vectors)),
        Artifact::new("vc.csv", vc),
    ])
}

/// Applies the configured sample filters.
pub fn filter_transactions(cfg: &RunConfig, records: Vec<TransactionRecord>) -> Vec<TransactionRecord> {
    let f = &cfg.fit;
    records
        .into_iter()
        .filter(|r| f.agglomerations.is_empty() || f.agglomerations.contains(&r.agglomeration))
        .filter(|r| f.year_min.is_none_or(|y| r.transaction_year >= y))
        .filter(|r| f.year_max.is_none_or(|y| r.transaction_year <= y))
        .collect()
}

pub fn fit(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    cfg.validate()?;
    let records = hedonic::read_transactions(cfg.require("transactions", &cfg.paths.transactions)?)?;
    let records = filter_transactions(cfg, records);
    let model = hedonic::fit(&records, &cfg.fit.spec())?;
    Ok(vec![Artifact::new("model.json", model.to_json() + "\n")])
}

/// Simulates Visual Capital for every building in the attributes file and
/// prices it with the hedonic model.
pub fn appraise(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    cfg.validate()?;
    let city = load_config_city(cfg)?;
    let attrs = hedonic::read_attributes(cfg.require("attributes", &cfg.paths.attributes)?)?;
    let registry = load_config_registry(cfg)?;
    let scorer = load_config_scorer(cfg, &registry)?;
    let model = load_config_model(cfg)?;
    for a in &attrs {
        city.building(&a.building_id)?;
    }
    let ids: Vec<String> = attrs.iter().map(|a| a.building_id.clone()).collect();
    let evals = in_pool(cfg, || {
        evaluate_buildings(&city, &ids, &cfg.simulation, &registry, &scorer)
    })?;
    let rows = attrs
        .iter()
        .zip(&evals)
        .map(|(a, e)| {
            let ln_price = model.predict(&a.with_vc(e.vc.vc))?;
            Ok(vec![
                a.building_id.clone(),
                a.agglomeration.clone(),
                e.vc.vc.to_string(),
                ln_price.to_string(),
                ln_price.exp().to_string(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![Artifact::new(
        "appraisal.csv",
        csv_text(&["building_id", "agglomeration", "vc", "ln_price", "price"], rows)?,
    )])
}

/// Everything an assessment produces, before serialization.
#[derive(Debug, Clone)]
pub struct Assessment {
    pub set: ScenarioSet,
    pub metric_impact: ImpactMatrix,
    pub vc_impact: ImpactMatrix,
    pub price: PriceImpact,
    pub evaluations: usize,
}

pub fn scenario_set(cfg: &RunConfig, city: &CityModel, mode: AssessMode) -> Result<ScenarioSet> {
    let s = &cfg.scenario;
    match mode {
        AssessMode::Regional => scenario::regional_upzoning(city, s.n_floors, s.k),
        AssessMode::Single => {
            let massing = city_io::read_buildings(cfg.require("massing", &cfg.paths.massing)?)?;
            scenario::single_development(city, &s.removed, massing, s.radius)
        }
    }
}

pub fn run_assessment(cfg: &RunConfig, mode: AssessMode) -> Result<Assessment> {
    cfg.validate()?;
    let city = load_config_city(cfg)?;
    let registry = load_config_registry(cfg)?;
    let scorer = load_config_scorer(cfg, &registry)?;
    let model = load_config_model(cfg)?;
    let set = scenario_set(cfg, &city, mode)?;
    let runner = PlanRunner::new(cfg.simulation, registry, scorer)?;
    let out = runner.run(&set, cfg.workers())?;
    let metric_impact = out.metric_impact(&set)?;
    let vc_impact = out.vc_impact(&set)?;
    let price = impact::price_impact(&vc_impact, &model, cfg.scenario.agglomeration.as_deref())?;
    Ok(Assessment {
        set,
        metric_impact,
        vc_impact,
        price,
        evaluations: out.evaluations,
    })
}

fn opt_str(v: Option<&str>) -> String {
    v.unwrap_or("").to_string()
}

pub fn assessment_artifacts(cfg: &RunConfig, a: &Assessment) -> Result<Vec<Artifact>> {
    let registry = load_config_registry(cfg)?;
    let scorer = load_config_scorer(cfg, &registry)?;
    let drivers = match impact::rank_metric_drivers(&a.metric_impact, &scorer) {
        Ok(d) => Some(d),
        Err(Error::RankingRequiresLinear) => {
            log::warn!("scorer is not linear; driver ranking skipped");
            None
        }
        Err(e) => return Err(e),
    };
    let signed = impact::mevm(&a.metric_impact);
    let loss = impact::mevm_loss(&a.metric_impact);
    let mevm_rows = a.metric_impact.entries.iter().map(|e| {
        let find = |list: &[impact::Mevm]| {
            list.iter()
                .find(|m| m.building_id == e.building_id && m.scenario_id == e.scenario_id)
                .map(|m| (m.metric.clone(), m.rel_change.to_string()))
                .unwrap_or_default()
        };
        let (sm, sv) = find(&signed);
        let (lm, lv) = find(&loss);
        vec![e.building_id.clone(), e.scenario_id.clone(), sm, sv, lm, lv]
    });
    let mevm = csv_text(
        &[
            "building_id",
            "scenario_id",
            "mevm_metric",
            "mevm_rel_change",
            "loss_metric",
            "loss_rel_change",
        ],
        mevm_rows,
    )?;
    let exposure = csv_text(
        &["building_id", "ELE", "worst_scenario"],
        a.price.exposure.iter().map(|e| {
            vec![
                e.building_id.clone(),
                e.ele.to_string(),
                opt_str(e.worst_scenario.as_deref()),
            ]
        }),
    )?;
    Ok(vec![
        Artifact::new("plan.json", a.set.manifest_json()),
        Artifact::new("impact.csv", impact::impact_csv(&a.metric_impact)?),
        Artifact::new("price_impact.csv", impact::price_impact_csv(&a.price)?),
        Artifact::new("scenarios.csv", impact::scenario_effects_csv(&a.price)?),
        Artifact::new("exposure.csv", exposure),
        Artifact::new("mevm.csv", mevm),
        Artifact::new(
            "impact.geojson",
            impact::impact_geojson(&a.set.reference, &a.price, drivers.as_deref()),
        ),
    ])
}

pub fn assess(cfg: &RunConfig, mode: AssessMode) -> Result<Vec<Artifact>> {
    let a = run_assessment(cfg, mode)?;
    log::info!("{} scenarios, {} evaluations", a.set.len(), a.evaluations);
    assessment_artifacts(cfg, &a)
}

/// Synthetic transactions drawn from the configured hedonic model (the
/// shipped fixture by default).
pub fn synth(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    cfg.validate()?;
    let config = synth::SyntheticConfig {
        n: cfg.synth.n,
        seed: cfg.seed,
        sigma: cfg.synth.sigma,
        truth: load_config_model(cfg)?,
    };
    let records = synth::generate(&config)?;
    Ok(vec![Artifact::new(
        "transactions.csv",
        hedonic::transactions_csv(&records)?,
    )])
}

const TOY_CONFIG: &str = "# Inputs of the toy lakeside commune.
output_dir = \"out\"

[paths]
terrain = \"terrain.asc\"
canopy = \"canopy.asc\"
landcover = \"landcover.asc\"
buildings = \"buildings.geojson\"
massing = \"massing.geojson\"
attributes = \"attributes.csv\"

[scenario]
k = 3
removed = [\"b13\", \"b14\"]
agglomeration = \"Lausanne\"
";

/// Built-in assets (registry, reference scorer, category table, hedonic
/// fixture) and the toy commune with a ready-made config.
pub fn export(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    cfg.validate()?;
    let registry = default_registry();
    let mut out = vec![
        Artifact::new("metric_registry.json", registry.to_json() + "\n"),
        Artifact::new("reference_scorer.json", reference_scorer(&registry).to_json() + "\n"),
        Artifact::new("landcover_categories.json", CATEGORY_REGISTRY_JSON.to_string()),
        Artifact::new("hedonic_lakeside.json", LAKESIDE_MODEL_JSON.to_string()),
    ];
    for (name, text) in demo::toy_files()? {
        out.push(Artifact::new(&format!("toy_commune/{name}"), text));
    }
    out.push(Artifact::new("toy_commune/config.toml", TOY_CONFIG.to_string()));
    Ok(out)
}
