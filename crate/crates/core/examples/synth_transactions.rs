//! Write a reproducible synthetic transactions CSV to stdout.
//!
//! `cargo run --example synth_transactions -- 20 42 > transactions.csv`

use design_appraisal::hedonic::synth::{generate, SyntheticConfig};
use design_appraisal::hedonic::{lakeside_model, transactions_csv};

fn main() -> design_appraisal::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let records = generate(&SyntheticConfig {
        n,
        seed,
        sigma: 0.1,
        truth: lakeside_model(),
    })?;
    print!("{}", transactions_csv(&records)?);
    Ok(())
}
