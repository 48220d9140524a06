#![allow(dead_code)]

use design_appraisal::citymodel::{
    Building, CanopyGrid, CityModel, GridLayout, LandcoverGrid, Polygon, Roof, TerrainGrid,
};
use design_appraisal::visibility::Category;
use rand::Rng;

pub fn rect(id: &str, x0: f64, y0: f64, x1: f64, y1: f64, eave: f64) -> Building {
    Building::new(id, Polygon::rectangle(x0, y0, x1, y1), 0.0, eave, Roof::Flat).unwrap()
}

#[allow(clippy::too_many_arguments)]
pub fn gabled(id: &str, x0: f64, y0: f64, x1: f64, y1: f64, eave: f64, ridge: f64, axis: f64) -> Building {
    let roof = Roof::Gabled {
        ridge_height: ridge,
        ridge_axis: axis,
    };
    Building::new(id, Polygon::rectangle(x0, y0, x1, y1), 0.0, eave, roof).unwrap()
}

/// Flat grass plain at elevation 0 with square cells.
pub fn flat_city(extent: f64, cell: f64, buildings: Vec<Building>) -> CityModel {
    let n = (extent / cell).round() as usize;
    let layout = GridLayout::new(0.0, 0.0, cell, n, n).unwrap();
    CityModel::new(
        TerrainGrid::flat(layout, 0.0),
        CanopyGrid::empty(layout),
        LandcoverGrid::uniform(layout, Category::Grass),
        buildings,
    )
    .unwrap()
}

/// Grid of detached 8 m houses, `cols` by `rows`, 20 m apart.
pub fn grid_city(cols: usize, rows: usize) -> CityModel {
    let mut buildings = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let (x, y) = (20.0 + 20.0 * c as f64, 20.0 + 20.0 * r as f64);
            buildings.push(rect(&format!("g{:03}", r * cols + c), x, y, x + 8.0, y + 8.0, 6.0));
        }
    }
    let extent = 40.0 + 20.0 * cols.max(rows) as f64;
    flat_city((extent / 20.0).ceil() * 20.0, 20.0, buildings)
}

/// Up to three non-overlapping axis-aligned boxes on a 300 m plain.
pub fn random_box_city(rng: &mut impl Rng) -> CityModel {
    let n = rng.random_range(1..=3);
    let mut buildings: Vec<Building> = Vec::new();
    while buildings.len() < n {
        let w = rng.random_range(6.0..40.0);
        let d = rng.random_range(6.0..40.0);
        let x0 = rng.random_range(60.0..240.0 - w);
        let y0 = rng.random_range(60.0..240.0 - d);
        let b = if rng.random_bool(0.3) {
            let eave = rng.random_range(3.0..25.0);
            gabled(
                &format!("b{}", buildings.len()),
                x0,
                y0,
                x0 + w,
                y0 + d,
                eave,
                eave + rng.random_range(0.5..8.0),
                if rng.random_bool(0.5) { 0.0 } else { 90.0 },
            )
        } else {
            rect(
                &format!("b{}", buildings.len()),
                x0,
                y0,
                x0 + w,
                y0 + d,
                rng.random_range(2.0..40.0),
            )
        };
        let [bx0, bx1, by0, by1] = b.footprint.bbox();
        let clear = buildings.iter().all(|o| {
            let [ox0, ox1, oy0, oy1] = o.footprint.bbox();
            bx1 < ox0 - 1.0 || ox1 < bx0 - 1.0 || by1 < oy0 - 1.0 || oy1 < by0 - 1.0
        });
        if clear {
            buildings.push(b);
        }
    }
    flat_city(300.0, 20.0, buildings)
}

/// Hand-enumerated three-building impact fixture. Values are multiples of
/// 1/64 so every delta and sum is exact in binary floating point.
pub mod three {
    use design_appraisal::impact::{ImpactMatrix, MetricMatrix, ScenarioMetrics};

    pub const METRICS: [&str; 3] = ["maxVSH:Water", "maxVSH:Sky", "maxVSH:Facade"];
    pub const BUILDINGS: [&str; 3] = ["A", "B", "C"];
    /// Scenario id and the building it modifies.
    pub const SCENARIOS: [(&str, &str); 3] = [("sA", "A"), ("sB", "B"), ("sC", "C")];

    pub const REF: [[f64; 3]; 3] = [[8.0, 16.0, 4.0], [0.0, 20.0, 8.0], [12.0, 10.0, 0.0]];
    /// `ALT[s][j]`.
    pub const ALT: [[[f64; 3]; 3]; 3] = [
        [[10.0, 24.0, 2.0], [0.0, 18.0, 12.0], [0.0, 10.0, 0.0]],
        [[8.0, 16.0, 4.0], [4.0, 26.0, 6.0], [12.0, 6.0, 3.0]],
        [[2.0, 12.0, 9.0], [0.0, 20.0, 8.0], [12.0, 14.0, 0.0]],
    ];
    /// Hand-written `ALT - REF`, `DELTA[s][j]`.
    pub const DELTA: [[[f64; 3]; 3]; 3] = [
        [[2.0, 8.0, -2.0], [0.0, -2.0, 4.0], [-12.0, 0.0, 0.0]],
        [[0.0, 0.0, 0.0], [4.0, 6.0, -2.0], [0.0, -4.0, 3.0]],
        [[-6.0, -4.0, 5.0], [0.0, 0.0, 0.0], [0.0, 4.0, 0.0]],
    ];
    /// Hand sums of the off-diagonal deltas per scenario.
    pub const CLE: [[f64; 3]; 3] = [[-12.0, -2.0, 4.0], [0.0, -4.0, 3.0], [-6.0, -4.0, 5.0]];
    /// Most negative local delta per building and metric with its scenario.
    pub const ELE: [[(f64, Option<&str>); 3]; 3] = [
        [(-6.0, Some("sC")), (-4.0, Some("sC")), (0.0, None)],
        [(0.0, None), (-2.0, Some("sA")), (0.0, None)],
        [(-12.0, Some("sA")), (-4.0, Some("sB")), (0.0, None)],
    ];
    /// Signed MEVM per (s, j): metric index and relative change.
    pub const MEVM: [[(usize, f64); 3]; 3] = [
        [(1, 0.5), (2, 0.5), (0, -1.0)],
        [(0, 0.0), (1, 0.3), (1, -0.4)],
        [(2, 1.25), (0, 0.0), (1, 0.4)],
    ];
    /// VC per building: reference row, then one row per scenario.
    pub const VC_REF: [f64; 3] = [0.5, 0.25, 0.75];
    pub const VC_ALT: [[f64; 3]; 3] = [[0.625, 0.25, 0.5], [0.5, 0.5, 0.625], [0.375, 0.25, 0.875]];

    pub fn scale(v: [f64; 3]) -> Vec<f64> {
        v.iter().map(|x| x / 64.0).collect()
    }

    fn names() -> Vec<String> {
        METRICS.iter().map(|s| s.to_string()).collect()
    }

    pub fn reference() -> MetricMatrix {
        let mut m = MetricMatrix::new("reference", names());
        for (j, b) in BUILDINGS.iter().enumerate() {
            m.insert(*b, scale(REF[j])).unwrap();
        }
        m
    }

    pub fn alternatives() -> Vec<MetricMatrix> {
        SCENARIOS
            .iter()
            .enumerate()
            .map(|(s, (id, _))| {
                let mut m = MetricMatrix::new(*id, names());
                for (j, b) in BUILDINGS.iter().enumerate() {
                    m.insert(*b, scale(ALT[s][j])).unwrap();
                }
                m
            })
            .collect()
    }

    pub fn vc_reference() -> MetricMatrix {
        let mut m = MetricMatrix::new("reference", vec!["VC".into()]);
        for (j, b) in BUILDINGS.iter().enumerate() {
            m.insert(*b, vec![VC_REF[j]]).unwrap();
        }
        m
    }

    pub fn vc_alternatives() -> Vec<MetricMatrix> {
        SCENARIOS
            .iter()
            .enumerate()
            .map(|(s, (id, _))| {
                let mut m = MetricMatrix::new(*id, vec!["VC".into()]);
                for (j, b) in BUILDINGS.iter().enumerate() {
                    m.insert(*b, vec![VC_ALT[s][j]]).unwrap();
                }
                m
            })
            .collect()
    }

    /// Exhaustive oracle: recompute every relative change from the raw values
    /// and keep the first metric with the largest magnitude.
    pub fn mevm_scan(im: &ImpactMatrix, loss_only: bool) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for e in &im.entries {
            let mut best: Option<(usize, f64)> = None;
            for m in 0..im.metric_names.len() {
                let (r, a) = (e.v_ref[m], e.v_alt[m]);
                let rc = if r == 0.0 {
                    if a == 0.0 {
                        Some(0.0)
                    } else {
                        None
                    }
                } else if a == 0.0 {
                    Some(-1.0)
                } else {
                    Some((a - r) / r)
                };
                let Some(rc) = rc else { continue };
                if loss_only && rc >= 0.0 {
                    continue;
                }
                if best.is_none() || rc.abs() > best.unwrap().1.abs() {
                    best = Some((m, rc));
                }
            }
            out.extend(best);
        }
        out
    }

    pub fn with_modified(alts: &[MetricMatrix]) -> Vec<ScenarioMetrics<'_>> {
        alts.iter()
            .zip(SCENARIOS)
            .map(|(m, (_, j))| ScenarioMetrics {
                matrix: m,
                modified_building: Some(j),
            })
            .collect()
    }
}

/// Ten hand-entered sales and a normal-equations HC1 oracle.
pub mod hc1 {
    use design_appraisal::hedonic::TransactionRecord;

    pub fn record(i: usize, ln_price: f64, vc: f64, agg: &str, year: i32, cov: &[(&str, f64)]) -> TransactionRecord {
        TransactionRecord {
            unit_id: format!("u{i}"),
            ln_price,
            vc,
            agglomeration: agg.into(),
            transaction_year: year,
            covariates: cov.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    /// VC, rooms, years since 2010, ln price. Small year values keep the
    /// normal equations well conditioned.
    pub fn hand_dataset() -> Vec<TransactionRecord> {
        let rows = [
            (0.10, 3.0, 0, 13.10),
            (0.25, 4.0, 1, 13.42),
            (0.40, 2.0, 2, 13.05),
            (0.55, 5.0, 0, 13.95),
            (0.70, 3.0, 4, 13.61),
            (0.15, 6.0, 5, 14.02),
            (0.85, 4.0, 3, 13.98),
            (0.35, 3.0, 6, 13.40),
            (0.60, 2.0, 1, 13.22),
            (0.95, 5.0, 7, 14.31),
        ];
        rows.iter()
            .enumerate()
            .map(|(i, &(vc, rooms, year, lp))| record(i, lp, vc, "A", year, &[("n_rooms", rooms)]))
            .collect()
    }

    fn gauss_jordan_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = a.len();
        let mut m: Vec<Vec<f64>> = a
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
                r
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
                .unwrap();
            m.swap(col, pivot);
            let p = m[col][col];
            for v in m[col].iter_mut() {
                *v /= p;
            }
            for row in 0..n {
                if row != col {
                    let f = m[row][col];
                    let src = m[col].clone();
                    for (v, s) in m[row].iter_mut().zip(src) {
                        *v -= f * s;
                    }
                }
            }
        }
        m.into_iter().map(|r| r[n..].to_vec()).collect()
    }

    fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let (n, k, m) = (a.len(), b.len(), b[0].len());
        (0..n)
            .map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
            .collect()
    }

    fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
    }

    pub struct Sandwich {
        pub beta: Vec<f64>,
        pub se: Vec<f64>,
        pub residuals: Vec<f64>,
    }

    /// (X'X)⁻¹ X' diag(e²) X (X'X)⁻¹ scaled by n / (n - k).
    pub fn sandwich(x: &[Vec<f64>], y: &[f64]) -> Sandwich {
        let (n, k) = (x.len() as f64, x[0].len() as f64);
        let xt = transpose(x);
        let bread = gauss_jordan_inverse(&matmul(&xt, x));
        let xty = matmul(&xt, &y.iter().map(|v| vec![*v]).collect::<Vec<_>>());
        let beta: Vec<f64> = matmul(&bread, &xty).into_iter().map(|r| r[0]).collect();
        let residuals: Vec<f64> = x
            .iter()
            .zip(y)
            .map(|(row, yi)| yi - row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let scaled: Vec<Vec<f64>> = x
            .iter()
            .zip(&residuals)
            .map(|(row, e)| row.iter().map(|v| v * e).collect())
            .collect();
        let cov = matmul(&matmul(&bread, &matmul(&transpose(&scaled), &scaled)), &bread);
        let se = (0..beta.len()).map(|j| (cov[j][j] * n / (n - k)).sqrt()).collect();
        Sandwich { beta, se, residuals }
    }
}
