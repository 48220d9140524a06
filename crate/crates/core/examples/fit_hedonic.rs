//! Draw synthetic transactions from the shipped agglomeration model, refit
//! it by OLS and compare the estimates with the truth.
//!
//! `cargo run --release --example fit_hedonic -- 5000`

use design_appraisal::hedonic::synth::{generate, SyntheticConfig};
use design_appraisal::hedonic::{fit, lakeside_model};

fn main() -> design_appraisal::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5000);
    let truth = lakeside_model();
    let records = generate(&SyntheticConfig {
        n,
        seed: 7,
        sigma: 0.1,
        truth: truth.clone(),
    })?;
    let model = fit(&records, &truth.spec)?;
    println!(
        "n = {}, R² = {:.4}, adjusted R² = {:.4}",
        model.n, model.r2, model.adj_r2
    );
    println!(
        "{:<24}{:>10}{:>10}{:>10}{:>8}",
        "term", "truth", "estimate", "HC1 SE", "z"
    );
    for (name, b) in &truth.coefficients {
        let est = model.coefficients[name];
        let se = model.robust_se[name];
        println!("{name:<24}{b:>10.4}{est:>10.4}{se:>10.4}{:>8.2}", (est - b) / se);
    }
    Ok(())
}
