//! Ordinary least squares by Householder QR with HC1 robust standard errors.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// A column is treated as collinear when its QR pivot falls below this
/// fraction of its own norm.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coefficients: DVector<f64>,
    pub robust_se: DVector<f64>,
    pub residuals: DVector<f64>,
    pub r2: f64,
    pub adj_r2: f64,
}

/// Fits `y = X b + e`. `names` label the columns of `x` for error messages;
/// `centered` selects the centred R² (models with an intercept).
pub fn ols(x: &DMatrix<f64>, y: &DVector<f64>, names: &[String], centered: bool) -> Result<OlsFit> {
    let (n, k) = x.shape();
    if n <= k {
        return Err(Error::TooFewObservations { n, k });
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let collinear: Vec<String> = (0..k)
        .filter(|&j| {
            let norm = x.column(j).norm();
            norm == 0.0 || r[(j, j)].abs() <= RANK_TOLERANCE * norm
        })
        .map(|j| names[j].clone())
        .collect();
    if !collinear.is_empty() {
        return Err(Error::RankDeficient { columns: collinear });
    }

    let mut qty = y.clone();
    qr.q_tr_mul(&mut qty);
    let qty = qty.rows(0, k).into_owned();
    let beta = r.solve_upper_triangular(&qty).ok_or_else(|| Error::RankDeficient {
        columns: names.to_vec(),
    })?;
    let residuals = y - x * &beta;

    // (X'X)^-1 = R^-1 R^-T
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::RankDeficient {
            columns: names.to_vec(),
        })?;
    let bread = &r_inv * r_inv.transpose();
    let mut scaled = x.clone();
    for (i, mut row) in scaled.row_iter_mut().enumerate() {
        row *= residuals[i].abs();
    }
    let meat = scaled.transpose() * &scaled;
    let cov = &bread * meat * &bread * (n as f64 / (n - k) as f64);
    let robust_se = DVector::from_iterator(k, (0..k).map(|j| cov[(j, j)].max(0.0).sqrt()));

    let ssr = residuals.norm_squared();
    let sst = if centered {
        let mean = y.mean();
        y.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    } else {
        y.norm_squared()
    };
    let r2 = if sst > 0.0 {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let dof_num = if centered { (n - 1) as f64 } else { n as f64 };
    let adj_r2 = 1.0 - (1.0 - r2) * dof_num / (n - k) as f64;

    Ok(OlsFit {
        coefficients: beta,
        robust_se,
        residuals,
        r2,
        adj_r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|j| format!("x{j}")).collect()
    }

    #[test]
    fn exact_line() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0, 7.0]);
        let fit = ols(&x, &y, &names(2), true).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicate_column_is_named() {
        let x = DMatrix::from_row_slice(4, 3, &[1.0, 0.0, 0.0, 1.0, 1.0, 2.0, 1.0, 2.0, 4.0, 1.0, 3.0, 6.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 5.0]);
        match ols(&x, &y, &names(3), true) {
            Err(Error::RankDeficient { columns }) => assert_eq!(columns, vec!["x2".to_string()]),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn needs_more_rows_than_columns() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        let y = DVector::from_vec(vec![1.0, 2.0]);
        assert!(matches!(
            ols(&x, &y, &names(2), true),
            Err(Error::TooFewObservations { .. })
        ));
    }
}
