//! Transactions CSV. Required columns are `unit_id`, `ln_price`, `vc`,
//! `agglomeration` and `transaction_year`; every other column is read as a
//! numeric covariate.

use std::path::Path;

use indexmap::IndexMap;

use super::{PropertyAttributes, TransactionRecord};
use crate::{Error, Result};

const REQUIRED: [&str; 5] = ["unit_id", "ln_price", "vc", "agglomeration", "transaction_year"];

fn from_reader<R: std::io::Read>(reader: R) -> std::result::Result<Vec<TransactionRecord>, String> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    let position = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| format!("missing column {name}"))
    };
    let idx: Vec<usize> = REQUIRED
        .iter()
        .map(|n| position(n))
        .collect::<std::result::Result<_, _>>()?;
    let covariates: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| !REQUIRED.contains(h))
        .map(|(i, h)| (i, h.to_string()))
        .collect();

    let mut out = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| e.to_string())?;
        let at = line + 2;
        let num = |i: usize, name: &str| -> std::result::Result<f64, String> {
            row[i]
                .parse::<f64>()
                .map_err(|_| format!("line {at}: {name} = {:?} is not a number", &row[i]))
        };
        let year = row[idx[4]]
            .parse::<i32>()
            .map_err(|_| format!("line {at}: transaction_year = {:?} is not an integer", &row[idx[4]]))?;
        let mut cov = IndexMap::new();
        for (i, name) in &covariates {
            cov.insert(name.clone(), num(*i, name)?);
        }
        out.push(TransactionRecord {
            unit_id: row[idx[0]].to_string(),
            ln_price: num(idx[1], "ln_price")?,
            vc: num(idx[2], "vc")?,
            agglomeration: row[idx[3]].to_string(),
            transaction_year: year,
            covariates: cov,
        });
    }
    Ok(out)
}

pub fn read_transactions(path: impl AsRef<Path>) -> Result<Vec<TransactionRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    from_reader(file).map_err(|m| Error::parse(path, m))
}

/// Serializes records with the covariate columns of the first record.
pub fn transactions_csv(records: &[TransactionRecord]) -> Result<String> {
    let cov_names: Vec<&String> = records
        .first()
        .map(|r| r.covariates.keys().collect())
        .unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = REQUIRED.to_vec();
    header.extend(cov_names.iter().map(|s| s.as_str()));
    let internal = |e: csv::Error| Error::Internal(e.to_string());
    w.write_record(&header).map_err(internal)?;
    for r in records {
        let mut row = vec![
            r.unit_id.clone(),
            r.ln_price.to_string(),
            r.vc.to_string(),
            r.agglomeration.clone(),
            r.transaction_year.to_string(),
        ];
        for name in &cov_names {
            let v = r
                .covariates
                .get(*name)
                .ok_or_else(|| Error::InvalidData(format!("record {} lacks {name}", r.unit_id)))?;
            row.push(v.to_string());
        }
        w.write_record(&row).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

pub fn write_transactions(path: impl AsRef<Path>, records: &[TransactionRecord]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, transactions_csv(records)?).map_err(|e| Error::io(path, e))
}

/// Attributes of an appraised building other than its simulated VC.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BuildingAttributes {
    pub building_id: String,
    pub agglomeration: String,
    pub transaction_year: i32,
    pub covariates: IndexMap<String, f64>,
}

impl BuildingAttributes {
    pub fn with_vc(&self, vc: f64) -> PropertyAttributes {
        PropertyAttributes {
            vc,
            agglomeration: Some(self.agglomeration.clone()),
            transaction_year: self.transaction_year,
            covariates: self.covariates.clone(),
        }
    }
}

const ATTRIBUTE_KEYS: [&str; 3] = ["building_id", "agglomeration", "transaction_year"];

/// Reads a building attributes CSV: `building_id`, `agglomeration`,
/// `transaction_year`, then numeric covariates.
pub fn read_attributes(path: impl AsRef<Path>) -> Result<Vec<BuildingAttributes>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = rdr.headers().map_err(|e| Error::parse(path, e))?.clone();
    let idx: Vec<usize> = ATTRIBUTE_KEYS
        .iter()
        .map(|k| {
            headers
                .iter()
                .position(|h| h == *k)
                .ok_or_else(|| Error::parse(path, format!("missing column {k}")))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| Error::parse(path, e))?;
        let bad = |what: String| Error::parse(path, format!("line {}: {what}", line + 2));
        let mut covariates = IndexMap::new();
        for (i, h) in headers.iter().enumerate() {
            if ATTRIBUTE_KEYS.contains(&h) {
                continue;
            }
            let v = row[i]
                .parse::<f64>()
                .map_err(|_| bad(format!("{h} = {:?} is not a number", &row[i])))?;
            covariates.insert(h.to_string(), v);
        }
        out.push(BuildingAttributes {
            building_id: row[idx[0]].to_string(),
            agglomeration: row[idx[1]].to_string(),
            transaction_year: row[idx[2]]
                .parse()
                .map_err(|_| bad(format!("transaction_year = {:?} is not an integer", &row[idx[2]])))?,
            covariates,
        });
    }
    Ok(out)
}

pub fn attributes_csv(rows: &[BuildingAttributes]) -> Result<String> {
    let cov_names: Vec<&String> = rows.first().map(|r| r.covariates.keys().collect()).unwrap_or_default();
    let internal = |e: csv::Error| Error::Internal(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = ATTRIBUTE_KEYS.to_vec();
    header.extend(cov_names.iter().map(|s| s.as_str()));
    w.write_record(&header).map_err(internal)?;
    for r in rows {
        let mut row = vec![
            r.building_id.clone(),
            r.agglomeration.clone(),
            r.transaction_year.to_string(),
        ];
        for name in &cov_names {
            let v = r
                .covariates
                .get(*name)
                .ok_or_else(|| Error::InvalidData(format!("building {} lacks {name}", r.building_id)))?;
            row.push(v.to_string());
        }
        w.write_record(&row).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

pub fn write_attributes(path: impl AsRef<Path>, rows: &[BuildingAttributes]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, attributes_csv(rows)?).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let recs = vec![TransactionRecord {
            unit_id: "a,1".into(),
            ln_price: 13.25,
            vc: 0.125,
            agglomeration: "Genève".into(),
            transaction_year: 2012,
            covariates: [("n_rooms".to_string(), 4.0)].into_iter().collect(),
        }];
        let text = transactions_csv(&recs).unwrap();
        assert_eq!(from_reader(text.as_bytes()).unwrap(), recs);
    }

    #[test]
    fn missing_column_and_bad_number() {
        assert!(from_reader("unit_id,ln_price,vc,agglomeration\n".as_bytes()).is_err());
        let bad = "unit_id,ln_price,vc,agglomeration,transaction_year\nx,abc,0,A,2010\n";
        assert!(from_reader(bad.as_bytes()).unwrap_err().contains("ln_price"));
    }
}
