//! Building-level view metrics aggregated from visual-share tensors.
//!
//! A metric is defined by data ([`MetricDef`]): which categories and
//! distance bins it reads, what it computes per viewpoint, and whether it
//! takes the maximum or the mean over a building's viewpoints. The default
//! registry holds 54 metrics.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::visibility::{Category, VisualShareTensor, N_BINS};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregator {
    MaxOverViewpoints,
    MeanOverViewpoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// Share of rays in the selection.
    Share,
    /// Number of categories seen by at least `min_rays` rays.
    Richness,
    /// Normalised Shannon entropy of the distance-bin marginals.
    Balance,
    /// Sum over the selected categories of their aggregated shares.
    Sentiment,
}

/// Category codes and one-based distance bins a metric reads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selector {
    pub categories: Vec<u8>,
    pub bins: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDef {
    pub name: String,
    pub aggregator: Aggregator,
    pub selector: Selector,
    pub kind: MetricKind,
    /// Richness threshold in rays.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub min_rays: u32,
}

fn one() -> u32 {
    1
}

fn is_one(v: &u32) -> bool {
    *v == 1
}

/// Ordered metric definitions; position defines the metric index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MetricRegistry {
    defs: Vec<MetricDef>,
}

/// Building-level metric values in registry order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    pub building_id: String,
    pub values: Vec<f64>,
}

pub const POSITIVE_SENTIMENT: [Category; 4] =
    [Category::Water, Category::Nature, Category::UrbanGreen, Category::Grass];
pub const NEGATIVE_SENTIMENT: [Category; 3] = [Category::Industrial, Category::MajorRoad, Category::Rail];
pub const NEUTRAL_SENTIMENT: [Category; 4] = [
    Category::Facade,
    Category::Roof,
    Category::Residential,
    Category::Commercial,
];

fn codes(cats: &[Category]) -> Vec<u8> {
    cats.iter().map(|c| c.code()).collect()
}

fn all_bins() -> Vec<u8> {
    (1..=N_BINS as u8).collect()
}

fn def(name: String, aggregator: Aggregator, categories: Vec<u8>, bins: Vec<u8>, kind: MetricKind) -> MetricDef {
    MetricDef {
        name,
        aggregator,
        selector: Selector { categories, bins },
        kind,
        min_rays: 1,
    }
}

/// The built-in 54-metric registry.
pub fn default_registry() -> MetricRegistry {
    use Aggregator::*;
    use MetricKind::*;
    let mut defs = Vec::new();
    for cat in Category::ALL {
        for (prefix, agg) in [("maxVSH", MaxOverViewpoints), ("meanVSH", MeanOverViewpoints)] {
            defs.push(def(
                format!("{prefix}:{}", cat.name()),
                agg,
                vec![cat.code()],
                all_bins(),
                Share,
            ));
        }
    }
    let ground_and_built: Vec<u8> = Category::ALL
        .iter()
        .filter(|c| **c != Category::Sky)
        .map(|c| c.code())
        .collect();
    for (label, bin) in [("Far", 4u8), ("Near", 1u8)] {
        for (prefix, agg) in [("maxVSH", MaxOverViewpoints), ("meanVSH", MeanOverViewpoints)] {
            defs.push(def(
                format!("{prefix}:{label}"),
                agg,
                ground_and_built.clone(),
                vec![bin],
                Share,
            ));
        }
    }
    let everything = codes(&Category::ALL);
    let mut elements = def(
        "richness:Elements".into(),
        MaxOverViewpoints,
        everything.clone(),
        all_bins(),
        Richness,
    );
    elements.min_rays = 2;
    defs.push(elements);
    defs.push(def(
        "richness:Panorama".into(),
        MeanOverViewpoints,
        everything,
        all_bins(),
        Richness,
    ));
    defs.push(def(
        "balance:Distance".into(),
        MeanOverViewpoints,
        ground_and_built,
        all_bins(),
        Balance,
    ));
    for (label, group) in [
        ("Positive", &POSITIVE_SENTIMENT[..]),
        ("Negative", &NEGATIVE_SENTIMENT[..]),
        ("Neutral", &NEUTRAL_SENTIMENT[..]),
    ] {
        for (prefix, agg) in [
            ("maxSentiment", MaxOverViewpoints),
            ("meanSentiment", MeanOverViewpoints),
        ] {
            defs.push(def(
                format!("{prefix}:{label}"),
                agg,
                codes(group),
                all_bins(),
                Sentiment,
            ));
        }
    }
    defs.push(def(
        "SkyExposure".into(),
        MeanOverViewpoints,
        vec![Category::Sky.code()],
        all_bins(),
        Share,
    ));
    MetricRegistry::new(defs).expect("built-in registry is valid")
}

impl MetricRegistry {
    pub fn new(defs: Vec<MetricDef>) -> Result<Self> {
        let mut seen = HashSet::new();
        for d in &defs {
            if !seen.insert(d.name.as_str()) {
                return Err(Error::Config(format!("duplicate metric name {}", d.name)));
            }
            if d.selector.categories.is_empty() || d.selector.bins.is_empty() {
                return Err(Error::Config(format!("metric {} selects nothing", d.name)));
            }
            if let Some(c) = d
                .selector
                .categories
                .iter()
                .find(|&&c| Category::from_code(c).is_none())
            {
                return Err(Error::Config(format!("metric {}: unknown category code {c}", d.name)));
            }
            if let Some(b) = d.selector.bins.iter().find(|&&b| b == 0 || b as usize > N_BINS) {
                return Err(Error::Config(format!(
                    "metric {}: distance bin {b} out of range",
                    d.name
                )));
            }
        }
        Ok(Self { defs })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let defs: Vec<MetricDef> =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("metric registry: {e}")))?;
        Self::new(defs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::parse(path, e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.defs).expect("registry serializes")
    }

    pub fn defs(&self) -> &[MetricDef] {
        &self.defs
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.defs.iter().map(|d| d.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.defs.iter().position(|d| d.name == name)
    }
}

fn reduce(values: impl Iterator<Item = f64>, agg: Aggregator) -> f64 {
    let (mut max, mut sum, mut n) = (f64::NEG_INFINITY, 0.0, 0usize);
    for v in values {
        max = max.max(v);
        sum += v;
        n += 1;
    }
    match agg {
        Aggregator::MaxOverViewpoints => max,
        Aggregator::MeanOverViewpoints => sum / n as f64,
    }
}

fn category_rays(tensor: &VisualShareTensor, vp: usize, code: u8, bins: &[u8]) -> u32 {
    let cat = Category::from_code(code).expect("validated code");
    bins.iter().map(|&b| tensor.counts[vp].get(cat, b as usize - 1)).sum()
}

fn evaluate(def: &MetricDef, tensor: &VisualShareTensor) -> f64 {
    let n_rays = tensor.n_rays_per_viewpoint as f64;
    let sel = &def.selector;
    let vps = 0..tensor.n_viewpoints();
    match def.kind {
        MetricKind::Share => reduce(
            vps.map(|v| {
                let rays: u32 = sel
                    .categories
                    .iter()
                    .map(|&c| category_rays(tensor, v, c, &sel.bins))
                    .sum();
                rays as f64 / n_rays
            }),
            def.aggregator,
        ),
        MetricKind::Sentiment => sel
            .categories
            .iter()
            .map(|&c| {
                reduce(
                    vps.clone()
                        .map(|v| category_rays(tensor, v, c, &sel.bins) as f64 / n_rays),
                    def.aggregator,
                )
            })
            .sum(),
        MetricKind::Richness => match def.aggregator {
            Aggregator::MaxOverViewpoints => sel
                .categories
                .iter()
                .filter(|&&c| {
                    vps.clone()
                        .any(|v| category_rays(tensor, v, c, &sel.bins) >= def.min_rays)
                })
                .count() as f64,
            Aggregator::MeanOverViewpoints => reduce(
                vps.map(|v| {
                    sel.categories
                        .iter()
                        .filter(|&&c| category_rays(tensor, v, c, &sel.bins) >= def.min_rays)
                        .count() as f64
                }),
                Aggregator::MeanOverViewpoints,
            ),
        },
        MetricKind::Balance => reduce(
            vps.map(|v| {
                let per_bin: Vec<f64> = sel
                    .bins
                    .iter()
                    .map(|&b| {
                        sel.categories
                            .iter()
                            .map(|&c| category_rays(tensor, v, c, &[b]))
                            .sum::<u32>() as f64
                    })
                    .collect();
                normalized_entropy(&per_bin)
            }),
            def.aggregator,
        ),
    }
}

/// Shannon entropy of the normalised weights divided by `ln(len)`; 0 when
/// all weights are zero or there is a single bin.
pub fn normalized_entropy(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 || weights.len() < 2 {
        return 0.0;
    }
    let h: f64 = weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.ln()
        })
        .sum();
    h / (weights.len() as f64).ln()
}

/// Aggregates a building's tensor into its metric vector.
pub fn aggregate(tensor: &VisualShareTensor, registry: &MetricRegistry) -> Result<MetricVector> {
    if tensor.n_viewpoints() == 0 {
        return Err(Error::NoViewpoints(tensor.building_id.clone()));
    }
    Ok(MetricVector {
        building_id: tensor.building_id.clone(),
        values: registry.defs.iter().map(|d| evaluate(d, tensor)).collect(),
    })
}

/// Wide CSV: one row per building, one column per metric.
pub fn metrics_csv(registry: &MetricRegistry, vectors: &[MetricVector]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["building_id".to_string()];
    header.extend(registry.names());
    w.write_record(&header).expect("in-memory write");
    for v in vectors {
        let mut row = vec![v.building_id.clone()];
        row.extend(v.values.iter().map(|x| x.to_string()));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// Shipped copy of [`default_registry`] as JSON.
pub const DEFAULT_REGISTRY_JSON: &str = include_str!("../../data/metric_registry.json");

#[cfg(test)]
mod tests {
    use super::*;
    use crate::visibility::HitCounts;

    fn tensor(rows: Vec<Vec<(Category, usize, u32)>>, n_rays: u32) -> VisualShareTensor {
        let counts = rows
            .into_iter()
            .map(|cells| {
                let mut h = HitCounts::default();
                let mut used = 0;
                for (c, b, n) in cells {
                    h.0[c.index()][b] += n;
                    used += n;
                }
                h.0[Category::Sky.index()][3] += n_rays - used;
                h
            })
            .collect();
        VisualShareTensor {
            building_id: "b".into(),
            n_rays_per_viewpoint: n_rays,
            counts,
        }
    }

    fn value(reg: &MetricRegistry, v: &MetricVector, name: &str) -> f64 {
        v.values[reg.index_of(name).unwrap()]
    }

    #[test]
    fn default_registry_shape() {
        let reg = default_registry();
        assert_eq!(reg.len(), 54);
        let names: HashSet<_> = reg.names().into_iter().collect();
        assert_eq!(names.len(), 54);
    }

    #[test]
    fn shipped_registry_matches_builtin() {
        assert_eq!(
            MetricRegistry::from_json(DEFAULT_REGISTRY_JSON).unwrap(),
            default_registry()
        );
    }

    #[test]
    fn empty_scene_is_all_sky() {
        let reg = default_registry();
        let v = aggregate(&tensor(vec![vec![]], 2600), &reg).unwrap();
        assert_eq!(value(&reg, &v, "maxVSH:Sky"), 1.0);
        assert_eq!(value(&reg, &v, "SkyExposure"), 1.0);
        assert_eq!(value(&reg, &v, "balance:Distance"), 0.0);
    }

    #[test]
    fn max_and_mean_of_water() {
        let reg = default_registry();
        let t = tensor(
            vec![vec![(Category::Water, 2, 52)], vec![(Category::Water, 3, 208)]],
            2600,
        );
        let v = aggregate(&t, &reg).unwrap();
        assert_eq!(value(&reg, &v, "maxVSH:Water"), 0.08);
        assert!((value(&reg, &v, "meanVSH:Water") - 0.05).abs() < 1e-15);
    }

    #[test]
    fn single_viewpoint_max_equals_mean() {
        let reg = default_registry();
        let t = tensor(vec![vec![(Category::Grass, 0, 900), (Category::Facade, 1, 300)]], 2600);
        let v = aggregate(&t, &reg).unwrap();
        for cat in Category::ALL {
            assert_eq!(
                value(&reg, &v, &format!("maxVSH:{}", cat.name())),
                value(&reg, &v, &format!("meanVSH:{}", cat.name()))
            );
        }
    }

    #[test]
    fn element_richness_census() {
        let reg = default_registry();
        // one stray ray of roof does not count as a visible element
        let t = tensor(
            vec![vec![
                (Category::Grass, 0, 900),
                (Category::Facade, 1, 300),
                (Category::Roof, 1, 1),
            ]],
            2600,
        );
        let v = aggregate(&t, &reg).unwrap();
        assert_eq!(value(&reg, &v, "richness:Elements"), 3.0);
        assert_eq!(value(&reg, &v, "richness:Panorama"), 4.0);
    }

    #[test]
    fn sentiment_sums_per_category_maxima() {
        let reg = default_registry();
        let t = tensor(
            vec![vec![(Category::Water, 0, 260)], vec![(Category::Nature, 0, 520)]],
            2600,
        );
        let v = aggregate(&t, &reg).unwrap();
        assert!((value(&reg, &v, "maxSentiment:Positive") - 0.3).abs() < 1e-15);
        assert!((value(&reg, &v, "meanSentiment:Positive") - 0.15).abs() < 1e-15);
    }

    #[test]
    fn balance_is_one_for_even_bins() {
        assert!((normalized_entropy(&[1.0, 1.0, 1.0, 1.0]) - 1.0).abs() < 1e-15);
        assert_eq!(normalized_entropy(&[5.0, 0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn empty_tensor_rejected() {
        let t = VisualShareTensor {
            building_id: "x".into(),
            n_rays_per_viewpoint: 2600,
            counts: vec![],
        };
        assert!(aggregate(&t, &default_registry()).is_err());
    }

    #[test]
    fn registry_rejects_duplicates_and_bad_bins() {
        let mut defs = default_registry().defs().to_vec();
        defs.push(defs[0].clone());
        assert!(MetricRegistry::new(defs).is_err());
        let mut bad = default_registry().defs()[..1].to_vec();
        bad[0].selector.bins = vec![5];
        assert!(MetricRegistry::new(bad).is_err());
    }
}
