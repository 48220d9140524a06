//! Hedonic log-price model,
//! `ln P = b0 + b_vc VC + location + macro-location + structural + time + e`,
//! fitted by least squares with HC1 standard
//! errors.
//!
//! The Visual Capital slope is either pooled or split by agglomeration
//! (`VC × one-hot(agglomeration)`, without a pooled column).

mod io;
mod ols;
pub mod synth;

use std::collections::BTreeSet;
use std::path::Path;

use indexmap::IndexMap;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use io::{
    attributes_csv, read_attributes, read_transactions, transactions_csv, write_attributes, write_transactions,
    BuildingAttributes,
};
pub use ols::{ols, OlsFit, RANK_TOLERANCE};

use crate::{Error, Result};

/// One sale. Covariates other than VC and year are kept by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransactionRecord {
    pub unit_id: String,
    pub ln_price: f64,
    pub vc: f64,
    pub agglomeration: String,
    pub transaction_year: i32,
    pub covariates: IndexMap<String, f64>,
}

/// Attributes of a property to price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyAttributes {
    pub vc: f64,
    pub agglomeration: Option<String>,
    pub transaction_year: i32,
    pub covariates: IndexMap<String, f64>,
}

impl From<&TransactionRecord> for PropertyAttributes {
    fn from(r: &TransactionRecord) -> Self {
        Self {
            vc: r.vc,
            agglomeration: Some(r.agglomeration.clone()),
            transaction_year: r.transaction_year,
            covariates: r.covariates.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VcMode {
    Pooled,
    ByAgglomeration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YearMode {
    Continuous,
    Dummies,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub vc_mode: VcMode,
    pub covariates: Vec<String>,
    pub year_mode: YearMode,
    pub intercept: bool,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            vc_mode: VcMode::Pooled,
            covariates: Vec::new(),
            year_mode: YearMode::Continuous,
            intercept: true,
        }
    }
}

/// Names of the structural, location and macro covariates of the full
/// specification.
pub const FULL_COVARIATES: [&str; 8] = [
    "log_volume",
    "n_rooms",
    "condition",
    "fitout_standard",
    "log_distance_water",
    "age",
    "log_plot_area",
    "log_macro_location",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Column {
    Intercept,
    Vc,
    VcFor(String),
    Covariate(String),
    Year,
    YearDummy(i32),
}

impl Column {
    fn name(&self) -> String {
        match self {
            Column::Intercept => "intercept".into(),
            Column::Vc => "VC".into(),
            Column::VcFor(a) => format!("VC:[{a}]"),
            Column::Covariate(c) => c.clone(),
            Column::Year => "year".into(),
            Column::YearDummy(y) => format!("year:[{y}]"),
        }
    }

    fn parse(name: &str) -> Column {
        let inner = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.strip_suffix(']'));
        match name {
            "intercept" => Column::Intercept,
            "VC" => Column::Vc,
            "year" => Column::Year,
            _ => {
                if let Some(a) = inner("VC:[") {
                    Column::VcFor(a.to_string())
                } else if let Some(y) = inner("year:[").and_then(|y| y.parse().ok()) {
                    Column::YearDummy(y)
                } else {
                    Column::Covariate(name.to_string())
                }
            }
        }
    }
}

/// Column layout of the design matrix.
#[derive(Debug, Clone)]
struct Design {
    columns: Vec<Column>,
    baseline_year: Option<i32>,
}

impl Design {
    fn from_data(spec: &ModelSpec, records: &[TransactionRecord]) -> Result<Self> {
        let mut columns = Vec::new();
        if spec.intercept {
            columns.push(Column::Intercept);
        }
        match spec.vc_mode {
            VcMode::Pooled => columns.push(Column::Vc),
            VcMode::ByAgglomeration => {
                let aggs: BTreeSet<&str> = records.iter().map(|r| r.agglomeration.as_str()).collect();
                if aggs.iter().any(|a| a.is_empty()) {
                    return Err(Error::InvalidData(
                        "by-agglomeration VC needs an agglomeration on every record".into(),
                    ));
                }
                columns.extend(aggs.into_iter().map(|a| Column::VcFor(a.to_string())));
            }
        }
        columns.extend(spec.covariates.iter().cloned().map(Column::Covariate));
        let mut baseline_year = None;
        match spec.year_mode {
            YearMode::Continuous => columns.push(Column::Year),
            YearMode::Dummies => {
                let years: BTreeSet<i32> = records.iter().map(|r| r.transaction_year).collect();
                let mut years = years.into_iter();
                if spec.intercept {
                    baseline_year = years.next();
                }
                columns.extend(years.map(Column::YearDummy));
            }
        }
        Ok(Self { columns, baseline_year })
    }

    fn from_names<'a>(names: impl Iterator<Item = &'a String>, baseline_year: Option<i32>) -> Self {
        Self {
            columns: names.map(|n| Column::parse(n)).collect(),
            baseline_year,
        }
    }

    fn names(&self) -> Vec<String> {
        self.columns.iter().map(Column::name).collect()
    }

    fn has_vc_for(&self, agg: &str) -> bool {
        self.columns.iter().any(|c| matches!(c, Column::VcFor(a) if a == agg))
    }

    fn row(&self, attrs: &PropertyAttributes) -> Result<Vec<f64>> {
        if let Some(agg) = &attrs.agglomeration {
            let split = self.columns.iter().any(|c| matches!(c, Column::VcFor(_)));
            if split && !self.has_vc_for(agg) {
                return Err(Error::UnknownAgglomeration(agg.clone()));
            }
        }
        let year_known = self.baseline_year == Some(attrs.transaction_year)
            || self
                .columns
                .iter()
                .any(|c| matches!(c, Column::YearDummy(y) if *y == attrs.transaction_year))
            || !self.columns.iter().any(|c| matches!(c, Column::YearDummy(_)));
        if !year_known {
            return Err(Error::InvalidData(format!(
                "unknown transaction year {}",
                attrs.transaction_year
            )));
        }
        self.columns
            .iter()
            .map(|c| {
                Ok(match c {
                    Column::Intercept => 1.0,
                    Column::Vc => attrs.vc,
                    Column::VcFor(a) => match &attrs.agglomeration {
                        Some(agg) if agg == a => attrs.vc,
                        Some(_) => 0.0,
                        None => return Err(Error::MissingAttribute("agglomeration".into())),
                    },
                    Column::Covariate(name) => *attrs
                        .covariates
                        .get(name)
                        .ok_or_else(|| Error::MissingAttribute(name.clone()))?,
                    Column::Year => attrs.transaction_year as f64,
                    Column::YearDummy(y) => (attrs.transaction_year == *y) as u8 as f64,
                })
            })
            .collect()
    }
}

/// A fitted (or loaded) hedonic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HedonicModel {
    pub spec: ModelSpec,
    pub coefficients: IndexMap<String, f64>,
    pub robust_se: IndexMap<String, f64>,
    pub r2: f64,
    pub adj_r2: f64,
    pub n: usize,
    /// Omitted reference year when years enter as dummies with an intercept.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_year: Option<i32>,
}

/// Change in log price from a VC change, and the matching relative price
/// change `exp(d_ln_price) - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceDelta {
    pub d_ln_price: f64,
    pub relative_price_change: f64,
}

impl PriceDelta {
    pub fn from_log(d_ln_price: f64) -> Self {
        Self {
            d_ln_price,
            relative_price_change: d_ln_price.exp_m1(),
        }
    }
}

fn validate_records(records: &[TransactionRecord], spec: &ModelSpec) -> Result<()> {
    for r in records {
        let bad = |what: &str| Error::InvalidData(format!("record {}: {what}", r.unit_id));
        if !r.ln_price.is_finite() {
            return Err(bad("ln_price is not finite"));
        }
        if !r.vc.is_finite() {
            return Err(bad("vc is not finite"));
        }
        for c in &spec.covariates {
            match r.covariates.get(c) {
                Some(v) if v.is_finite() => {}
                Some(_) => return Err(bad(&format!("{c} is not finite"))),
                None => return Err(bad(&format!("missing {c}"))),
            }
        }
    }
    Ok(())
}

/// Fits the model by QR least squares.
pub fn fit(records: &[TransactionRecord], spec: &ModelSpec) -> Result<HedonicModel> {
    validate_records(records, spec)?;
    let design = Design::from_data(spec, records)?;
    let names = design.names();
    let (n, k) = (records.len(), names.len());
    if k == 0 {
        return Err(Error::Config("empty design".into()));
    }
    if n <= k {
        return Err(Error::TooFewObservations { n, k });
    }
    let mut x = DMatrix::zeros(n, k);
    for (i, r) in records.iter().enumerate() {
        let row = design.row(&PropertyAttributes::from(r))?;
        for (j, v) in row.into_iter().enumerate() {
            x[(i, j)] = v;
        }
    }
    let y = DVector::from_iterator(n, records.iter().map(|r| r.ln_price));
    let fit = ols(&x, &y, &names, spec.intercept)?;
    Ok(HedonicModel {
        spec: spec.clone(),
        coefficients: names.iter().cloned().zip(fit.coefficients.iter().copied()).collect(),
        robust_se: names.iter().cloned().zip(fit.robust_se.iter().copied()).collect(),
        r2: fit.r2,
        adj_r2: fit.adj_r2,
        n,
        baseline_year: design.baseline_year,
    })
}

impl HedonicModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: HedonicModel = serde_json::from_str(text).map_err(|e| Error::Config(format!("hedonic model: {e}")))?;
        if m.coefficients.keys().ne(m.robust_se.keys()) {
            return Err(Error::Config(
                "coefficients and robust_se name different columns".into(),
            ));
        }
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::parse(path, e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    fn design(&self) -> Design {
        Design::from_names(self.coefficients.keys(), self.baseline_year)
    }

    pub fn agglomerations(&self) -> Vec<String> {
        self.design()
            .columns
            .into_iter()
            .filter_map(|c| match c {
                Column::VcFor(a) => Some(a),
                _ => None,
            })
            .collect()
    }

    /// Predicted log price.
    pub fn predict(&self, attrs: &PropertyAttributes) -> Result<f64> {
        let row = self.design().row(attrs)?;
        Ok(row.iter().zip(self.coefficients.values()).map(|(x, b)| x * b).sum())
    }

    /// VC slope for an agglomeration. Pooled models ignore the label.
    pub fn vc_coefficient(&self, agglomeration: Option<&str>) -> Result<f64> {
        if let Some(b) = self.coefficients.get("VC") {
            return Ok(*b);
        }
        let agg = agglomeration.ok_or_else(|| Error::MissingAttribute("agglomeration".into()))?;
        self.coefficients
            .get(&Column::VcFor(agg.to_string()).name())
            .copied()
            .ok_or_else(|| Error::UnknownAgglomeration(agg.to_string()))
    }

    /// Log-price change when only VC moves by `dvc`.
    pub fn price_delta_vc(&self, agglomeration: Option<&str>, dvc: f64) -> Result<PriceDelta> {
        Ok(PriceDelta::from_log(self.vc_coefficient(agglomeration)? * dvc))
    }
}

/// Published lakeside-agglomeration model with building and macro-location
/// covariates, shipped as a prediction fixture.
pub const LAKESIDE_MODEL_JSON: &str = include_str!("../../data/hedonic_lakeside.json");

pub fn lakeside_model() -> HedonicModel {
    HedonicModel::from_json(LAKESIDE_MODEL_JSON).expect("shipped model parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_names_roundtrip() {
        for c in [
            Column::Intercept,
            Column::Vc,
            Column::VcFor("Vevey-Montreux".into()),
            Column::Covariate("log_volume".into()),
            Column::Year,
            Column::YearDummy(2011),
        ] {
            assert_eq!(Column::parse(&c.name()), c);
        }
    }

    #[test]
    fn fixture_loads() {
        let m = lakeside_model();
        assert_eq!(m.vc_coefficient(Some("Lausanne")).unwrap(), 0.35);
        assert_eq!(m.adj_r2, 0.81);
        assert_eq!(m.n, 7651);
        assert_eq!(m.agglomerations().len(), 9);
    }

    #[test]
    fn unknown_agglomeration_and_missing_attribute() {
        let m = lakeside_model();
        assert!(matches!(
            m.price_delta_vc(Some("Basel"), 0.1),
            Err(Error::UnknownAgglomeration(_))
        ));
        let attrs = PropertyAttributes {
            vc: 0.5,
            agglomeration: Some("Lausanne".into()),
            transaction_year: 2015,
            covariates: IndexMap::new(),
        };
        assert!(matches!(m.predict(&attrs), Err(Error::MissingAttribute(_))));
    }

    #[test]
    fn zero_delta() {
        let d = lakeside_model().price_delta_vc(Some("Lausanne"), 0.0).unwrap();
        assert_eq!(d.d_ln_price, 0.0);
        assert_eq!(d.relative_price_change, 0.0);
    }
}
