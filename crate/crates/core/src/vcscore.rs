//! Visual Capital scoring: a file-defined function from a metric vector to a
//! scalar index. Linear and small feed-forward network scorers are
//! supported.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::viewmetrics::{MetricRegistry, MetricVector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Squash {
    None,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
        }
    }
}

/// Dense layer; `weights[i]` is the row of output unit `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum VcScorer {
    Linear {
        metric_names: Vec<String>,
        weights: Vec<f64>,
        bias: f64,
        squash: Squash,
    },
    /// Hidden layers use `activation`; the last layer has one unit and a
    /// logistic output.
    Mlp {
        metric_names: Vec<String>,
        layers: Vec<Layer>,
        activation: Activation,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualCapital {
    pub building_id: String,
    pub vc: f64,
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl VcScorer {
    pub fn metric_names(&self) -> &[String] {
        match self {
            VcScorer::Linear { metric_names, .. } | VcScorer::Mlp { metric_names, .. } => metric_names,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.metric_names().len();
        if m == 0 {
            return Err(Error::InvalidScorer("no metric names".into()));
        }
        match self {
            VcScorer::Linear { weights, bias, .. } => {
                if weights.len() != m {
                    return Err(Error::InvalidScorer(format!(
                        "{} weights for {m} metric names",
                        weights.len()
                    )));
                }
                if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidScorer("non-finite weight".into()));
                }
            }
            VcScorer::Mlp { layers, .. } => {
                if layers.is_empty() {
                    return Err(Error::InvalidScorer("network has no layers".into()));
                }
                let mut width = m;
                for (k, layer) in layers.iter().enumerate() {
                    if layer.weights.len() != layer.biases.len() || layer.weights.is_empty() {
                        return Err(Error::InvalidScorer(format!(
                            "layer {k}: weight rows and biases disagree"
                        )));
                    }
                    if layer.weights.iter().any(|row| row.len() != width) {
                        return Err(Error::InvalidScorer(format!(
                            "layer {k}: expected {width} inputs per unit"
                        )));
                    }
                    if layer
                        .weights
                        .iter()
                        .flatten()
                        .chain(&layer.biases)
                        .any(|w| !w.is_finite())
                    {
                        return Err(Error::InvalidScorer(format!("layer {k}: non-finite weight")));
                    }
                    width = layer.weights.len();
                }
                if width != 1 {
                    return Err(Error::InvalidScorer("output layer must have a single unit".into()));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: VcScorer = serde_json::from_str(text).map_err(|e| Error::InvalidScorer(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scorer serializes")
    }

    /// Errors unless the scorer's names equal the registry names in order.
    pub fn check_registry(&self, registry: &MetricRegistry) -> Result<()> {
        let expected = registry.names();
        let names = self.metric_names();
        if names == expected.as_slice() {
            return Ok(());
        }
        let missing: Vec<String> = expected.iter().filter(|n| !names.contains(n)).cloned().collect();
        let extra: Vec<String> = names.iter().filter(|n| !expected.contains(n)).cloned().collect();
        Err(Error::RegistryMismatch { missing, extra })
    }

    /// Raw score of a value slice in scorer order.
    pub fn evaluate(&self, values: &[f64]) -> f64 {
        match self {
            VcScorer::Linear {
                weights, bias, squash, ..
            } => {
                let z = bias + weights.iter().zip(values).map(|(w, v)| w * v).sum::<f64>();
                match squash {
                    Squash::None => z,
                    Squash::Logistic => logistic(z),
                }
            }
            VcScorer::Mlp { layers, activation, .. } => {
                let mut x = values.to_vec();
                for (k, layer) in layers.iter().enumerate() {
                    let last = k + 1 == layers.len();
                    x = layer
                        .weights
                        .iter()
                        .zip(&layer.biases)
                        .map(|(row, b)| {
                            let z = b + row.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>();
                            if last {
                                z
                            } else {
                                activation.apply(z)
                            }
                        })
                        .collect();
                }
                logistic(x[0])
            }
        }
    }

    pub fn score(&self, vector: &MetricVector) -> Result<VisualCapital> {
        if vector.values.len() != self.metric_names().len() {
            return Err(Error::RegistryMismatch {
                missing: Vec::new(),
                extra: vec![format!(
                    "vector has {} values, scorer expects {}",
                    vector.values.len(),
                    self.metric_names().len()
                )],
            });
        }
        let vc = self.evaluate(&vector.values);
        if !vc.is_finite() {
            return Err(Error::InvalidData(format!("non-finite VC for {}", vector.building_id)));
        }
        Ok(VisualCapital {
            building_id: vector.building_id.clone(),
            vc,
        })
    }

    /// Per-metric weights of a linear scorer.
    pub fn linear_weights(&self) -> Option<&[f64]> {
        match self {
            VcScorer::Linear { weights, .. } => Some(weights),
            VcScorer::Mlp { .. } => None,
        }
    }

    /// Upper bound on the Lipschitz constant (Euclidean norms): product of
    /// the layers' Frobenius norms times 1/4 for a logistic output.
    pub fn lipschitz_bound(&self) -> f64 {
        let frob = |rows: &[Vec<f64>]| rows.iter().flatten().map(|w| w * w).sum::<f64>().sqrt();
        match self {
            VcScorer::Linear { weights, squash, .. } => {
                let n = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
                match squash {
                    Squash::None => n,
                    Squash::Logistic => n / 4.0,
                }
            }
            VcScorer::Mlp { layers, .. } => layers.iter().map(|l| frob(&l.weights)).product::<f64>() / 4.0,
        }
    }
}

/// Loads a scorer and checks it against the registry that will feed it.
pub fn load_scorer(path: impl AsRef<Path>, registry: &MetricRegistry) -> Result<VcScorer> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let scorer = VcScorer::from_json(&text)?;
    scorer.check_registry(registry)?;
    Ok(scorer)
}

/// Reference linear scorer for the default registry: rewards positive
/// landscape elements, sky, distant views and balance; penalises negative
/// ones.
pub fn reference_scorer(registry: &MetricRegistry) -> VcScorer {
    let weight = |name: &str| -> f64 {
        match name {
            "maxVSH:Water" => 3.0,
            "meanVSH:Water" => 2.0,
            "maxVSH:River" | "maxVSH:Nature" | "maxVSH:UrbanGreen" => 1.0,
            "meanVSH:River" | "meanVSH:Nature" | "meanVSH:UrbanGreen" => 0.5,
            "maxVSH:Vegetation" | "maxVSH:Grass" | "maxVSH:Glacier" => 0.5,
            "meanVSH:Vegetation" | "meanVSH:Grass" | "meanVSH:Glacier" => 0.25,
            "maxVSH:Sky" => 1.0,
            "meanVSH:Sky" | "SkyExposure" => 0.5,
            "maxVSH:Far" => 1.5,
            "meanVSH:Far" => 1.0,
            "maxVSH:Near" => -0.5,
            "meanVSH:Near" => -0.5,
            "balance:Distance" => 0.5,
            "richness:Elements" => 0.05,
            "richness:Panorama" => 0.05,
            "maxSentiment:Positive" => 1.0,
            "meanSentiment:Positive" => 1.0,
            "maxVSH:Industrial" | "maxVSH:MajorRoad" | "maxVSH:Rail" => -1.0,
            "meanVSH:Industrial" | "meanVSH:MajorRoad" | "meanVSH:Rail" => -0.5,
            "maxSentiment:Negative" => -1.0,
            "meanSentiment:Negative" => -1.0,
            "maxVSH:Facade" => -0.5,
            "meanVSH:Facade" => -0.5,
            _ => 0.0,
        }
    };
    let metric_names = registry.names();
    VcScorer::Linear {
        weights: metric_names.iter().map(|n| weight(n)).collect(),
        metric_names,
        bias: -1.5,
        squash: Squash::Logistic,
    }
}

/// Shipped copy of the reference scorer.
pub const REFERENCE_SCORER_JSON: &str = include_str!("../data/reference_scorer.json");
