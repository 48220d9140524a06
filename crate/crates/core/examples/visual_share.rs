//! Cast the 2600-ray view cones from every façade viewpoint of one building
//! and print the mean visual share per landcover category and distance bin.
//!
//! `cargo run --release --example visual_share -- b02`

use design_appraisal::demo;
use design_appraisal::visibility::{bin_range, visual_share, Category, Scene, SimulationConfig, N_BINS};

fn main() -> design_appraisal::Result<()> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "b02".into());
    let city = demo::toy_commune();
    let scene = Scene::new(&city);
    let tensor = visual_share(&scene, &id, &SimulationConfig::default())?;
    let n = tensor.n_viewpoints();
    println!("{id}: {n} viewpoints, {} rays each", tensor.n_rays_per_viewpoint);

    print!("{:<12}", "category");
    for bin in 0..N_BINS {
        let (lo, hi) = bin_range(bin);
        print!(
            "{:>14}",
            if hi.is_finite() {
                format!("{lo}-{hi} m")
            } else {
                format!(">{lo} m")
            }
        );
    }
    println!();
    for cat in Category::ALL {
        let mean: Vec<f64> = (0..N_BINS)
            .map(|bin| (0..n).map(|v| tensor.share(v, cat, bin)).sum::<f64>() / n as f64)
            .collect();
        if mean.iter().all(|s| *s == 0.0) {
            continue;
        }
        print!("{:<12}", cat.name());
        for s in mean {
            print!("{s:>14.4}");
        }
        println!();
    }
    Ok(())
}
